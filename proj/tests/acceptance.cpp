// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Lines starting with "info" are diagnostics.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tvflow/analysis.hpp"
#include "tvflow/experiments.hpp"
#include "tvflow/oracle.hpp"
#include "tvflow/solver.hpp"

using namespace tvflow;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d (%s): %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void info(const std::string& s) {
  std::printf("info: %s\n", s.c_str());
  std::fflush(stdout);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

fs::path work_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "tvflow_acceptance" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Accumulates the outcome of one sampled invariant.
struct Tally {
  std::string name;
  std::size_t samples = 0;
  std::size_t bad = 0;
  double worst = 0.0;  // worst value relative to the tolerance

  void add(double value, double tol) {
    ++samples;
    worst = std::max(worst, value / tol);
    if (!(value <= tol)) ++bad;
  }
};

struct RunFlags {
  std::string name;
  bool hypothesis = false;
  bool monotone = true;
  double max_increase = 0.0;
  double max_x_ratio = 0.0;
};

// ---------------------------------------------------------------------------

void criterion_geometry() {
  Stopwatch sw;
  constexpr std::size_t n = 10000;
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Tally> tallies;
  for (auto kind : {ManifoldKind::SphereS2, ManifoldKind::RotationSO3}) {
    const std::string m(to_string(kind));
    Tally idem{m + " projection idempotence"}, orth{m + " projection orthogonality"},
        sum{m + " projection sum"}, on_m{m + " exp on manifold"}, speed{m + " geodesic speed"},
        geo4{m + " exp vs oracle dt=1e-4"}, geo5{m + " exp vs oracle dt=1e-5"};
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = random_point(kind, rng);
      std::normal_distribution<double> g;
      std::vector<double> v(p.coords().size());
      for (double& x : v) x = g(rng);
      const auto t = tangent_project(p, v);
      const auto tt = tangent_project(p, t.coords());
      idem.add(max_abs_diff(tt.coords(), t.coords()), 1e-12);
      const auto nrm = normal_project(p, v);
      double dot = 0.0;
      std::vector<double> s(v.size());
      for (std::size_t k = 0; k < v.size(); ++k) {
        dot += t.coords()[k] * nrm[k];
        s[k] = t.coords()[k] + nrm[k];
      }
      orth.add(std::abs(dot), 1e-10);
      sum.add(max_abs_diff(s, v), 1e-12);

      const auto x = random_tangent(p, rng, 1.0);
      const double tau = unit(rng);
      std::vector<double> scaled(x.coords().begin(), x.coords().end());
      for (double& c : scaled) c *= tau;
      const auto q = exp_map(TangentVector::make(p, scaled));
      on_m.add(raw::point_defect(kind, q.coords()), 1e-10);

      const double h = 1e-4;
      const double t0 = h + (1.0 - 2.0 * h) * unit(rng);
      std::vector<double> a(x.coords().begin(), x.coords().end()), b = a;
      for (double& c : a) c *= t0 + h;
      for (double& c : b) c *= t0 - h;
      const auto qa = exp_map(TangentVector::make(p, a));
      const auto qb = exp_map(TangentVector::make(p, b));
      std::vector<double> chord(a.size());
      for (std::size_t k = 0; k < a.size(); ++k) chord[k] = qa.coords()[k] - qb.coords()[k];
      speed.add(std::abs(norm(chord) / (2.0 * h) - x.norm()), 1e-6);

      const auto e = exp_map(x);
      geo4.add(max_abs_diff(geodesic_oracle(x, 1.0, 1e-4).coords(), e.coords()), 5e-4);
      geo5.add(max_abs_diff(geodesic_oracle(x, 1.0, 1e-5).coords(), e.coords()), 5e-5);
    }
    for (auto* t : {&idem, &orth, &sum, &on_m, &speed, &geo4, &geo5}) tallies.push_back(*t);
  }

  Tally euler{"S2 Euler round trip"}, axis{"SO3 axis-angle round trip"};
  constexpr double pi = std::numbers::pi;
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = 0.1 + (pi - 0.2) * unit(rng);
    const double phi = -pi + 1e-6 + (2.0 * pi - 1e-6) * unit(rng);
    const auto ang = s2_euler_angles(s2_from_euler(theta, phi));
    euler.add(std::max(std::abs(ang.theta - theta), std::abs(ang.phi - phi)), 1e-8);

    const double th = 0.1 + 2.9 * unit(rng);
    const auto axis_pt = random_point(ManifoldKind::SphereS2, rng);
    const auto aa = so3_axis_angle(rotation_from_axis_angle(th, axis_pt.coords()));
    axis.add(std::max(std::abs(aa.theta - th), max_abs_diff(aa.axis, axis_pt.coords())), 1e-8);
  }
  tallies.push_back(euler);
  tallies.push_back(axis);

  bool all = true;
  for (const auto& t : tallies) {
    info(fmt("geometry %-34s %zu samples, %zu outside tolerance, worst/tol %.3g", t.name.c_str(),
             t.samples, t.bad, t.worst));
    all = all && t.bad == 0;
  }
  const double cm = c_m_empirical(ManifoldKind::SphereS2, 1000000);
  const bool cm_ok = std::abs(cm - 0.5) <= 1e-3;
  report(8, "geometry suite", all && cm_ok,
         fmt("%zu invariants x 1e4 samples %s; c_m_empirical(S2, 1e6) = %.6f; %.0f s", tallies.size(),
             all ? "all within tolerance" : "with violations", cm, sw.seconds()));
}

void criterion_inner_solver() {
  Stopwatch sw;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> tau_dist(0.02, 0.3);
  double worst_bf = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto g = build_uniform_1d(i % 5 == 0 ? 1 : 2, 1.0);
    Field u(g, 3);
    for (std::size_t a = 0; a < u.size(); ++a) {
      const auto p = random_point(ManifoldKind::SphereS2, rng);
      std::copy(p.coords().begin(), p.coords().end(), u.at(a).begin());
    }
    SchemeConfig cfg;
    cfg.tau = tau_dist(rng);
    const auto r = solve_vp_loc(ManifoldKind::SphereS2, u, cfg);
    Field d(g, 3, oracle::brute_force_vp_loc(u, cfg.tau));
    for (std::size_t k = 0; k < d.values().size(); ++k) d.values()[k] -= r.x.values()[k];
    worst_bf = std::max(worst_bf, h_delta_norm(d));
  }

  double worst_dense = 0.0;
  std::normal_distribution<double> normal;
  const auto g = build_uniform_1d(10, 1.0);
  for (int i = 0; i < 50; ++i) {
    Field u(g, 3);
    for (std::size_t a = 0; a < u.size(); ++a) {
      const auto p = random_point(ManifoldKind::SphereS2, rng);
      std::copy(p.coords().begin(), p.coords().end(), u.at(a).begin());
    }
    SBIState s(g, 3);
    for (double& v : s.z0.values()) v = normal(rng);
    for (double& v : s.b0.values()) v = normal(rng);
    for (double& v : s.z1.values()) v = normal(rng);
    for (double& v : s.b1.values()) v = normal(rng);
    SchemeConfig cfg;
    cfg.boundary = i % 2 == 0 ? Boundary::Neumann : Boundary::Dirichlet;
    const VpLocProblem p(ManifoldKind::SphereS2, u, 1e-2, cfg);
    worst_dense = std::max(worst_dense, max_abs_diff(x_step(s, p).x.values(), oracle::dense_x_step(s, p)));
  }
  report(7, "inner solver", worst_bf <= 1e-3 && worst_dense <= 1e-8,
         fmt("max |X - brute force| = %.3g (tol 1e-3, 50 instances); max |x_step - dense| = %.3g "
             "(tol 1e-8, 50 instances); %.1f s",
             worst_bf, worst_dense, sw.seconds()));
}

}  // namespace

int main() {
  ::unsetenv(kOutDirEnv);
  Stopwatch total;
  std::vector<RunFlags> runs;

  // Convergence study: criteria 1, 2, 3, 6.
  {
    Stopwatch sw;
    auto cfg = default_config(Experiment::ConvergenceStudy);
    cfg.out_dir = work_dir("convergence");
    const auto rep = run_convergence_study(cfg);
    std::vector<double> errors;
    bool decreasing = true;
    bool dominated = true;
    for (const auto& c : rep.cases) {
      info(fmt("convergence tau=%g error=%.4e steps=%zu max inner iterations=%d log(err^2)=%.3f "
               "log(bound)=%.3f",
               c.tau, c.error, c.steps, c.max_inner_iterations, c.log_error_sq, c.log_bound));
      if (!errors.empty() && !(c.error < errors.back())) decreasing = false;
      errors.push_back(c.error);
      dominated = dominated && c.log_error_sq < c.log_bound;
      runs.push_back({fmt("S2 convergence tau=%g", c.tau), c.dissipation.hypothesis_holds,
                      c.dissipation.monotone, c.dissipation.max_increase, c.max_x_ratio});
    }
    const auto& fit = *rep.fit;
    report(1, "convergence order", fit.slope >= 0.8 && fit.r2 >= 0.98 && decreasing,
           fmt("slope %.4f (target >= 0.8, floor 0.45), r2 %.5f (>= 0.98), errors %s; %.0f s", fit.slope,
               fit.r2, decreasing ? "strictly decreasing" : "NOT strictly decreasing", sw.seconds()));
    report(2, "error estimate dominance", dominated,
           fmt("error^2 < bound for all %zu step lengths (C0=%.4g C1=%.4g C2=%.4g, compared in log space)",
               rep.cases.size(), rep.constants.c0, rep.constants.c1, rep.constants.c2));
  }

  // S^2 benchmark to t = 2: criteria 3, 4, 5, 6.
  {
    Stopwatch sw;
    auto cfg = default_config(Experiment::S2Benchmark);
    cfg.scheme.tau = 1e-3;
    cfg.t_end = 2.0;
    cfg.snapshots = {0.0, 0.5, 1.0, 2.0};
    cfg.out_dir = work_dir("s2");
    const auto rep = run_s2_benchmark(cfg);
    const auto& traj = rep.trajectory;
    const std::size_t mid = 50;
    double min_gap = 1.0;
    double first_small = -1.0;
    std::size_t decreases = 0;
    double max_decrease = 0.0;
    double first_decrease = -1.0;
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const double h1 = traj.states[n].at(mid)[0];
      min_gap = std::min(min_gap, 1.0 - h1);
      if (first_small < 0.0 && !(h1 < 1.0 - 1e-6)) first_small = traj.times[n];
      if (n > 0 && h1 < traj.states[n - 1].at(mid)[0]) {
        if (decreases++ == 0) first_decrease = traj.times[n];
        max_decrease = std::max(max_decrease, traj.states[n - 1].at(mid)[0] - h1);
      }
    }
    const bool nondecreasing = decreases == 0;
    const bool below = first_small < 0.0;
    const bool outer = rep.outer_facet_deviation <= 1e-6;
    const auto exact = ode_h_integrate(default_benchmark(), 2.0, cfg.oracle_dt);
    report(4, "non-stopping", below && nondecreasing && outer,
           fmt("h1 < 1-1e-6 %s; h1 %s; min 1-h1 = %.3g (oracle 1-h1 at t=2: %.3g, h3 %.3g); outer facet deviation %.3g "
               "(tol 1e-6); %.0f s",
               below ? "at every step" : fmt("fails from t=%.3f", first_small).c_str(),
               nondecreasing ? "nondecreasing"
                             : fmt("decreases at %zu steps from t=%.3f by at most %.2g", decreases,
                                   first_decrease, max_decrease).c_str(),
               min_gap, 1.0 - exact.h.h1, exact.h.h3,
               rep.outer_facet_deviation, sw.seconds()));
    info(fmt("S2 benchmark: h1 < 1 strictly at every step: %s", min_gap > 0.0 ? "yes" : "no"));
    runs.push_back({"S2 benchmark tau=1e-3", rep.dissipation.hypothesis_holds, rep.dissipation.monotone,
                    rep.dissipation.max_increase, rep.max_x_ratio});

    // SO(3) experiment: criteria 3, 5, 6, 9.
    Stopwatch sw3;
    auto c3 = default_config(Experiment::So3);
    c3.scheme.tau = 1e-3;
    c3.out_dir = work_dir("so3");
    const auto r3 = run_so3(c3);
    bool counts_ok = true;
    std::string counts;
    for (std::size_t i = 0; i < r3.facet_counts.size(); ++i) {
      counts += (i ? " " : "") + std::to_string(r3.facet_counts[i]);
      if (i > 0 && r3.facet_counts[i] < r3.facet_counts[i - 1]) counts_ok = false;
    }
    report(5, "facet preservation", rep.facets_preserved && counts_ok,
           fmt("S2: all 97 interior edges in facet(u_n, 1e-6) at every step: %s; SO3 facet counts at "
               "snapshots [%s]: %s",
               rep.facets_preserved ? "yes" : "no", counts.c_str(),
               counts_ok ? "nondecreasing" : "decreasing"));
    runs.push_back({"SO3 25x25 tau=1e-3", r3.dissipation.hypothesis_holds, r3.dissipation.monotone,
                    r3.dissipation.max_increase, r3.max_x_ratio});
    const double tv0 = r3.snapshot_energy.front();
    const double tv1 = r3.snapshot_energy.back();
    report(9, "SO(3) steady state", tv1 <= 0.05 * tv0,
           fmt("TV(u(1)) = %.4g, TV(u0) = %.4g, ratio %.3g (<= 0.05); %.0f s", tv1, tv0, tv1 / tv0,
               sw3.seconds()));
  }

  // Inner-tolerance diagnostics for criteria 4 and 5.
  {
    Stopwatch sw;
    auto cfg = default_config(Experiment::S2Benchmark);
    cfg.scheme.tau = 1e-3;
    cfg.scheme.inner_tol = 1e-8;
    cfg.t_end = 0.05;
    cfg.snapshots = {0.0, 0.05};
    cfg.out_dir = work_dir("s2_tight");
    const auto rep = run_s2_benchmark(cfg);
    info(fmt("S2 benchmark with inner_tol=1e-8 to t=0.05: outer facet deviation %.3g, all 97 edges "
             "preserved: %s (%.1f s)",
             rep.outer_facet_deviation, rep.facets_preserved ? "yes" : "no", sw.seconds()));
    Stopwatch sw3;
    auto c3 = default_config(Experiment::So3);
    c3.scheme.tau = 1e-3;
    c3.scheme.inner_tol = 1e-8;
    c3.t_end = 0.02;
    c3.snapshots = {0.0, 0.01, 0.02};
    c3.out_dir = work_dir("so3_tight");
    const auto r3 = run_so3(c3);
    std::string counts;
    for (std::size_t i = 0; i < r3.facet_counts.size(); ++i) {
      counts += (i ? " " : "") + std::to_string(r3.facet_counts[i]);
    }
    info(fmt("SO3 with inner_tol=1e-8 to t=0.02: facet counts [%s] (%.1f s)", counts.c_str(), sw3.seconds()));
  }

  // Criterion 3 and 6 over every run above.
  {
    bool dissipative = true;
    bool bounded = true;
    std::size_t checked = 0;
    double worst_ratio = 0.0;
    for (const auto& r : runs) {
      info(fmt("%-26s tau*curv*lip <= 1: %-3s TV monotone: %-3s max TV increase %.3g, max ||X||/(tau lip) %.4f",
               r.name.c_str(), r.hypothesis ? "yes" : "no", r.monotone ? "yes" : "no", r.max_increase,
               r.max_x_ratio));
      if (r.hypothesis) {
        ++checked;
        dissipative = dissipative && r.monotone;
      }
      worst_ratio = std::max(worst_ratio, r.max_x_ratio);
      bounded = bounded && r.max_x_ratio <= 1.1;
    }
    report(3, "energy dissipation", dissipative && checked > 0,
           fmt("%zu of %zu runs satisfy the step-size hypothesis; TV nonincreasing (slack 1e-10) in all of "
               "them: %s",
               checked, runs.size(), dissipative ? "yes" : "no"));
    report(6, "increment bound", bounded,
           fmt("max ||X_n|| / (tau lip) = %.4f over %zu runs (<= 1.1)", worst_ratio, runs.size()));
  }

  criterion_inner_solver();
  criterion_geometry();

  // Determinism: identical configs give identical CSV bytes.
  {
    auto read = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    std::size_t compared = 0;
    bool same = true;
    auto compare = [&](const fs::path& a, const fs::path& b) {
      for (const auto& entry : fs::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        ++compared;
        const fs::path other = b / entry.path().filename();
        same = same && fs::exists(other) && read(entry.path()) == read(other);
      }
    };
    auto s2 = default_config(Experiment::S2Benchmark);
    s2.t_end = 0.1;
    s2.scheme.tau = 1e-2;
    s2.snapshots = {0.0, 0.05, 0.1};
    s2.out_dir = work_dir("det_s2_a");
    run_s2_benchmark(s2);
    const fs::path s2a = s2.out_dir;
    s2.out_dir = work_dir("det_s2_b");
    run_s2_benchmark(s2);
    compare(s2a, s2.out_dir);

    auto so3 = default_config(Experiment::So3);
    so3.t_end = 0.05;
    so3.scheme.tau = 1e-2;
    so3.snapshots = {0.0, 0.05};
    so3.out_dir = work_dir("det_so3_a");
    run_so3(so3);
    const fs::path so3a = so3.out_dir;
    so3.out_dir = work_dir("det_so3_b");
    run_so3(so3);
    compare(so3a, so3.out_dir);
    report(10, "determinism", same && compared > 0,
           fmt("%zu CSV files compared byte for byte: %s", compared, same ? "identical" : "DIFFERENT"));
  }

  std::printf("acceptance: %d criteria failed; total %.0f s\n", failures, total.seconds());
  return failures == 0 ? 0 : 1;
}
