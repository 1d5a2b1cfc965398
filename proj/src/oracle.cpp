#include "tvflow/oracle.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tvflow/errors.hpp"
#include "tvflow/geometry.hpp"

namespace tvflow {

void BenchmarkSpec::validate() const {
  if (!(a1 > 0.0)) throw PreconditionError("benchmark: a1 must be > 0");
  if (std::abs(a1 * a1 + a2 * a2 - 1.0) > 1e-12) {
    throw PreconditionError("benchmark: a1^2 + a2^2 must equal 1");
  }
  if (h0[1] != 0.0 || h0[2] == 0.0) {
    throw PreconditionError("benchmark: h0 must lie in {x2 = 0} with x3 != 0");
  }
  if (std::abs(h0[0] * h0[0] + h0[2] * h0[2] - 1.0) > 1e-12) {
    throw PreconditionError("benchmark: h0 must be a unit vector");
  }
  if (!(0.0 < l1 && l1 < l2 && l2 < length)) {
    throw PreconditionError("benchmark: need 0 < l1 < l2 < L");
  }
}

BenchmarkSpec default_benchmark() {
  const double r = 1.0 / std::numbers::sqrt2;
  BenchmarkSpec s;
  s.a1 = r;
  s.a2 = r;
  s.h0 = {r, 0.0, r};
  s.l1 = 0.4;
  s.l2 = 0.6;
  s.length = 1.0;
  return s;
}

namespace {

// sqrt(2) a1 / (c sqrt(1 - a1 h1)) written with gap = 1 - h1.
double coefficient(double gap, const BenchmarkSpec& spec) {
  const double q = (1.0 - spec.a1) + spec.a1 * gap;
  if (!(q > 0.0)) {
    throw std::domain_error("ode_h: singular coefficient (1 - a1 h1 <= 0)");
  }
  return std::numbers::sqrt2 * spec.a1 / (spec.c() * std::sqrt(q));
}

// Explicit Euler in the variables (gap, h3) = (1 - h1, h3). This is the same
// recursion as stepping (h1, h3) but keeps 1 - h1 representable once h1 is
// within rounding of 1.
struct GapState {
  double gap;
  double h3;
};

GapState gap_step(GapState s, const BenchmarkSpec& spec, double dt) {
  const double k = coefficient(s.gap, spec);
  const double h1 = 1.0 - s.gap;
  // h1' = h1 - dt k (h1^2 - 1) and h1^2 - 1 = -gap (2 - gap).
  return {s.gap - dt * k * s.gap * (2.0 - s.gap), s.h3 - dt * k * h1 * s.h3};
}

double drift(GapState s) {
  return std::abs(s.gap * s.gap - 2.0 * s.gap + s.h3 * s.h3);
}

}  // namespace

HPoint ode_h_rhs(HPoint h, const BenchmarkSpec& spec) {
  const double q = 1.0 - spec.a1 * h.h1;
  if (!(q > 0.0)) throw std::domain_error("ode_h: singular coefficient (1 - a1 h1 <= 0)");
  const double k = std::numbers::sqrt2 * spec.a1 / (spec.c() * std::sqrt(q));
  return {-k * (h.h1 * h.h1 - 1.0), -k * h.h1 * h.h3};
}

HPoint ode_h_step(HPoint h, const BenchmarkSpec& spec, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("ode_h_step: dt must be > 0");
  const HPoint r = ode_h_rhs(h, spec);
  return {h.h1 + dt * r.h1, h.h3 + dt * r.h3};
}

std::vector<HPoint> ode_h_sample(const BenchmarkSpec& spec, std::span<const double> times,
                                 double dt) {
  spec.validate();
  if (!(dt > 0.0)) throw PreconditionError("ode_h: dt must be > 0");
  std::vector<HPoint> out;
  out.reserve(times.size());
  GapState s{1.0 - spec.h0[0], spec.h0[2]};
  std::size_t done = 0;  // full steps taken
  double prev_t = -1.0;
  for (double t : times) {
    if (t < 0.0 || t < prev_t) throw PreconditionError("ode_h: sample times must ascend from 0");
    prev_t = t;
    const auto total = static_cast<std::size_t>(std::ceil(t / dt - 1e-9));
    while (done + 1 < total) {
      s = gap_step(s, spec, dt);
      ++done;
    }
    GapState at = s;
    if (total > done) {
      const double rest = t - static_cast<double>(done) * dt;
      if (rest > 0.0) at = gap_step(s, spec, rest);
    }
    out.push_back({1.0 - at.gap, at.h3});
  }
  return out;
}

OdeSolution ode_h_integrate(const BenchmarkSpec& spec, double t_end, double dt) {
  spec.validate();
  if (!(dt > 0.0)) throw PreconditionError("ode_h: dt must be > 0");
  if (t_end < 0.0) throw PreconditionError("ode_h: t_end must be >= 0");
  OdeSolution sol;
  GapState s{1.0 - spec.h0[0], spec.h0[2]};
  sol.max_drift = drift(s);
  const auto total = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  for (std::size_t i = 0; i < total; ++i) {
    const double step = i + 1 < total ? dt : t_end - static_cast<double>(i) * dt;
    if (step <= 0.0) break;
    const GapState next = gap_step(s, spec, step);
    if (!(next.gap < s.gap)) sol.h1_strictly_increasing = false;
    s = next;
    sol.max_drift = std::max(sol.max_drift, drift(s));
    ++sol.steps;
  }
  sol.h = {1.0 - s.gap, s.h3};
  return sol;
}

Field facet_field(const BenchmarkSpec& spec, const GridPtr& grid, HPoint h) {
  if (grid->partition.dim() != 1) throw PreconditionError("benchmark fields need a 1-D grid");
  const auto a = spec.a();
  const auto b = spec.b();
  const std::array<double, 3> mid{h.h1, 0.0, h.h3};
  Field u(grid, 3);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double x = grid->partition.cell(i).center()[0];
    const auto& v = x < spec.l1 ? a : (x < spec.l2 ? mid : b);
    std::copy(v.begin(), v.end(), u.at(i).begin());
  }
  return u;
}

Field exact_flow(const BenchmarkSpec& spec, const GridPtr& grid, double t, double dt) {
  if (t < 0.0) throw PreconditionError("exact_flow: t must be >= 0");
  const double times[] = {t};
  return facet_field(spec, grid, ode_h_sample(spec, times, dt).front());
}

Field build_s2_benchmark_initial(const GridPtr& grid) {
  if (grid->partition.dim() != 1) {
    throw PreconditionError("S^2 benchmark initial data needs a 1-D grid");
  }
  if (std::abs(grid->partition.domain_measure() - 1.0) > 1e-12) {
    throw PreconditionError("S^2 benchmark initial data needs the domain (0, 1)");
  }
  constexpr double pi = std::numbers::pi;
  const std::array<double, 3> theta{pi / 2, pi / 4, pi / 2};
  const std::array<double, 3> phi{pi / 4, pi / 2, 3 * pi / 4};
  const BenchmarkSpec spec = default_benchmark();
  const std::array<std::array<double, 3>, 3> facets{spec.a(), spec.h0, spec.b()};
  for (int i = 0; i < 3; ++i) {
    const auto p = s2_from_euler(theta[i], phi[i]);
    for (int k = 0; k < 3; ++k) {
      if (std::abs(p.coords()[k] - facets[i][k]) > 1e-12) {
        throw std::logic_error("benchmark Euler angles disagree with facet values");
      }
    }
  }
  return facet_field(spec, grid, {spec.h0[0], spec.h0[2]});
}

So3BlockAngles so3_block_angles() {
  constexpr double pi = std::numbers::pi;
  So3BlockAngles t;
  t.theta = {{{0.35 * pi, 0.2 * pi, 0.55 * pi},
              {0.81 * pi, 0.64 * pi, 0.4 * pi},
              {0.1 * pi, 0.7 * pi, 0.3 * pi}}};
  t.phi = {{{0.4 * pi, 0.5 * pi, 0.7 * pi},
            {0.5 * pi, 0.3 * pi, 0.4 * pi},
            {0.6 * pi, 0.3 * pi, 0.4 * pi}}};
  t.psi = {{{0.2 * pi, 0.25 * pi, 0.3 * pi},
            {0.25 * pi, 0.225 * pi, 0.2 * pi},
            {0.3 * pi, 0.2 * pi, 0.35 * pi}}};
  return t;
}

Field build_so3_initial(const GridPtr& grid) {
  if (grid->partition.dim() != 2) throw PreconditionError("SO(3) initial data needs a 2-D grid");
  const auto& part = grid->partition;
  for (const Cell& c : part.cells()) {
    if (c.lo[0] < 0.0 || c.lo[1] < 0.0 || c.hi[0] > 1.0 + 1e-12 || c.hi[1] > 1.0 + 1e-12) {
      throw PreconditionError("SO(3) initial data needs the domain (0,1)^2");
    }
  }
  const auto angles = so3_block_angles();
  std::array<std::array<std::vector<double>, 3>, 3> blocks;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto axis = s2_from_euler(angles.phi[i][j], angles.psi[i][j]);
      const auto r = rotation_from_axis_angle(angles.theta[i][j], axis.coords());
      blocks[i][j].assign(r.coords().begin(), r.coords().end());
    }
  }
  Field u(grid, 9);
  for (std::size_t a = 0; a < u.size(); ++a) {
    const auto c = part.cell(a).center();
    const int i = c[0] < 0.4 ? 0 : (c[0] < 0.6 ? 1 : 2);
    const int j = c[1] < 0.2 ? 0 : (c[1] < 0.8 ? 1 : 2);
    std::copy(blocks[i][j].begin(), blocks[i][j].end(), u.at(a).begin());
  }
  return u;
}

}  // namespace tvflow
