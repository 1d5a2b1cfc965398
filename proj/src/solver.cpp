#include "tvflow/solver.hpp"

#include <cmath>
#include <string>

#include "tvflow/errors.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {

std::string_view to_string(Boundary b) {
  return b == Boundary::Neumann ? "neumann" : "dirichlet";
}

Boundary boundary_from_string(std::string_view name) {
  if (name == "neumann") return Boundary::Neumann;
  if (name == "dirichlet") return Boundary::Dirichlet;
  throw PreconditionError("unknown boundary condition '" + std::string(name) + "'");
}

void SchemeConfig::validate() const {
  if (!(tau > 0.0)) throw PreconditionError("tau must be > 0");
  if (!(rho > 0.0)) throw PreconditionError("rho must be > 0");
  if (!(inner_tol > 0.0 && inner_tol < 1.0)) throw PreconditionError("inner_tol must lie in (0,1)");
  if (inner_max_iters <= 0) throw PreconditionError("inner_max_iters must be > 0");
  if (!(gs_tol > 0.0)) throw PreconditionError("gs_tol must be > 0");
  if (gs_max_iters <= 0) throw PreconditionError("gs_max_iters must be > 0");
}

SBIState::SBIState(const GridPtr& grid, std::size_t dim)
    : x(grid, dim), z0(grid, dim), z1(grid, dim), b0(grid, dim), b1(grid, dim) {}

VpLocProblem::VpLocProblem(ManifoldKind kind, const Field& u_prev, double tau,
                           const SchemeConfig& cfg)
    : kind_(kind), u_prev_(&u_prev), grad_u_(discrete_gradient(u_prev)), tau_(tau), cfg_(&cfg) {
  if (u_prev.dim() != ambient_dim(kind)) {
    throw PreconditionError("field dimension does not match the manifold");
  }
  if (!(tau > 0.0)) throw PreconditionError("step length must be > 0");
  const Grid& g = *u_prev.grid();
  const std::size_t n = g.partition.size();
  rows_.diag.resize(n);
  rows_.offsets.assign(1, 0);
  for (std::size_t a = 0; a < n; ++a) {
    const double scale = cfg.rho / g.partition.cell(a).measure;
    double sum = 0.0;
    for (const Incidence& inc : g.edges.incident(a)) {
      const double c = scale * g.edges.edge(inc.edge).measure;
      rows_.neighbor.push_back(inc.neighbor);
      rows_.coupling.push_back(c);
      sum += c;
    }
    rows_.diag[a] = 1.0 + cfg.rho + sum;
    rows_.offsets.push_back(rows_.neighbor.size());
  }
}

std::span<const unsigned char> VpLocProblem::pinned() const {
  if (cfg_->boundary == Boundary::Neumann) return {};
  return u_prev_->grid()->partition.boundary_mask();
}

double localized_energy(const Field& x, const VpLocProblem& problem) {
  require_compatible(x, problem.u_prev());
  std::vector<double> moved(x.values().begin(), x.values().end());
  const auto u = problem.u_prev().values();
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] += u[i];
  const Field shifted(x.grid(), x.dim(), std::move(moved));
  const double n = h_delta_norm(x);
  return problem.tau() * discrete_tv(shifted) + 0.5 * n * n;
}

namespace {

void require_state(const SBIState& s, const VpLocProblem& p) {
  require_compatible(s.x, p.u_prev());
  require_compatible(s.z1, p.u_prev());
  require_compatible(s.b1, p.u_prev());
  require_compatible(p.u_prev(), s.z0);
  require_compatible(p.u_prev(), s.b0);
}

}  // namespace

namespace {

// Forward Gauss-Seidel on the cached rows. After a forward sweep the residual
// of row a is sum over later neighbours b of coupling_ab * (change of X_b),
// so it is accumulated from the sweep deltas without a second pass.
template <std::size_t D>
void gauss_seidel(const GaussSeidelRows& rows, std::span<const double> measures,
                  std::span<const unsigned char> pinned, std::size_t dim_rt,
                  std::span<const double> rhs, std::span<double> x, double target,
                  int max_sweeps, XStepResult& out) {
  const std::size_t dim = D ? D : dim_rt;
  const std::size_t n = rows.diag.size();
  const auto is_pinned = [&](std::size_t a) { return !pinned.empty() && pinned[a] != 0; };
  std::vector<double> delta(n * dim, 0.0);
  double acc_buf[9];
  std::vector<double> acc_heap(D ? 0 : dim);
  double* acc = D ? acc_buf : acc_heap.data();

  double r2 = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (is_pinned(a)) continue;
    for (std::size_t k = 0; k < dim; ++k) acc[k] = rhs[a * dim + k] - rows.diag[a] * x[a * dim + k];
    for (std::size_t j = rows.offsets[a]; j < rows.offsets[a + 1]; ++j) {
      const double c = rows.coupling[j];
      const double* xb = x.data() + rows.neighbor[j] * dim;
      for (std::size_t k = 0; k < dim; ++k) acc[k] += c * xb[k];
    }
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += acc[k] * acc[k];
    r2 += measures[a] * s;
  }
  out.residual = std::sqrt(r2);

  while (out.residual > target) {
    if (out.sweeps >= max_sweeps) {
      throw ConvergenceError("Gauss-Seidel did not reach the residual tolerance", out.sweeps,
                             out.residual);
    }
    for (std::size_t a = 0; a < n; ++a) {
      if (is_pinned(a)) continue;
      const double* ra = rhs.data() + a * dim;
      for (std::size_t k = 0; k < dim; ++k) acc[k] = ra[k];
      for (std::size_t j = rows.offsets[a]; j < rows.offsets[a + 1]; ++j) {
        const double c = rows.coupling[j];
        const double* xb = x.data() + rows.neighbor[j] * dim;
        for (std::size_t k = 0; k < dim; ++k) acc[k] += c * xb[k];
      }
      const double inv = 1.0 / rows.diag[a];
      double* xa = x.data() + a * dim;
      double* da = delta.data() + a * dim;
      for (std::size_t k = 0; k < dim; ++k) {
        const double next = acc[k] * inv;
        da[k] = next - xa[k];
        xa[k] = next;
      }
    }
    ++out.sweeps;
    r2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (is_pinned(a)) continue;
      for (std::size_t k = 0; k < dim; ++k) acc[k] = 0.0;
      for (std::size_t j = rows.offsets[a]; j < rows.offsets[a + 1]; ++j) {
        const std::size_t b = rows.neighbor[j];
        if (b < a) continue;
        const double c = rows.coupling[j];
        const double* db = delta.data() + b * dim;
        for (std::size_t k = 0; k < dim; ++k) acc[k] += c * db[k];
      }
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += acc[k] * acc[k];
      r2 += measures[a] * s;
    }
    out.residual = std::sqrt(r2);
  }
}

}  // namespace

XStepResult x_step(const SBIState& state, const VpLocProblem& problem) {
  require_state(state, problem);
  const Grid& g = *problem.u_prev().grid();
  const std::size_t dim = problem.u_prev().dim();
  const std::size_t n = g.partition.size();
  const double rho = problem.config().rho;
  const auto pinned = problem.pinned();
  const auto measures = g.partition.measures();

  // rhs = rho (Z1 - B1) + rho D*(Z0 - D u - B0)
  std::vector<double> w(state.z0.values().size());
  {
    const auto z0 = state.z0.values();
    const auto du = problem.grad_u_prev().values();
    const auto b0 = state.b0.values();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = z0[i] - du[i] - b0[i];
  }
  std::vector<double> rhs(n * dim);
  kernels::adjoint(g, dim, w, rhs);
  {
    const auto z1 = state.z1.values();
    const auto b1 = state.b1.values();
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = rho * (z1[i] - b1[i] + rhs[i]);
  }

  double rhs_sq = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    if (!pinned.empty() && pinned[a] != 0) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += rhs[a * dim + k] * rhs[a * dim + k];
    rhs_sq += measures[a] * s;
  }
  const double target = problem.config().gs_tol * (1.0 + std::sqrt(rhs_sq));

  XStepResult out{state.x, 0, 0.0};
  auto xv = out.x.values();
  for (std::size_t a = 0; a < n; ++a) {
    if (!pinned.empty() && pinned[a] != 0) {
      for (std::size_t k = 0; k < dim; ++k) xv[a * dim + k] = 0.0;
    }
  }
  const int cap = problem.config().gs_max_iters;
  const auto& rows = problem.gs_rows();
  if (dim == 3) {
    gauss_seidel<3>(rows, measures, pinned, dim, rhs, xv, target, cap, out);
  } else if (dim == 9) {
    gauss_seidel<9>(rows, measures, pinned, dim, rhs, xv, target, cap, out);
  } else {
    gauss_seidel<0>(rows, measures, pinned, dim, rhs, xv, target, cap, out);
  }
  return out;
}

EdgeField z0_step(const SBIState& state, const VpLocProblem& problem) {
  require_state(state, problem);
  const Grid& g = *state.x.grid();
  const std::size_t dim = state.x.dim();
  EdgeField a(state.z0.grid(), dim);
  kernels::gradient(g, dim, state.x.values(), a.values());
  {
    auto av = a.values();
    const auto du = problem.grad_u_prev().values();
    const auto b0 = state.b0.values();
    for (std::size_t i = 0; i < av.size(); ++i) av[i] += du[i] + b0[i];
  }
  EdgeField out(state.z0.grid(), dim);
  kernels::shrink_edges(dim, a.values(), problem.tau() / problem.config().rho, out.values());
  return out;
}

Field z1_step(const SBIState& state, const VpLocProblem& problem) {
  require_state(state, problem);
  const std::size_t dim = state.x.dim();
  std::vector<double> sum(state.x.values().begin(), state.x.values().end());
  const auto b1 = state.b1.values();
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b1[i];
  Field out(state.x.grid(), dim);
  kernels::project_cells(problem.kind(), problem.u_prev().values(), sum, problem.pinned(),
                         out.values());
  return out;
}

std::pair<EdgeField, Field> b_update(const SBIState& state, const VpLocProblem& problem) {
  require_state(state, problem);
  const Grid& g = *state.x.grid();
  const std::size_t dim = state.x.dim();
  EdgeField dx(state.z0.grid(), dim);
  kernels::gradient(g, dim, state.x.values(), dx.values());
  EdgeField b0 = state.b0;
  kernels::bregman_update(b0.values(), dx.values(), problem.grad_u_prev().values(),
                          state.z0.values());
  Field b1 = state.b1;
  kernels::bregman_update(b1.values(), state.x.values(), {}, state.z1.values());
  return {std::move(b0), std::move(b1)};
}

VpLocResult solve_vp_loc(const VpLocProblem& problem, SBIState* start) {
  problem.config().validate();
  const SchemeConfig& cfg = problem.config();
  const Field& u = problem.u_prev();
  SBIState local(u.grid(), u.dim());
  SBIState& state = start ? *start : local;
  require_state(state, problem);
  state.k = 0;

  VpLocResult result{Field(u.grid(), u.dim()), 0, 0.0, 0, {}};
  Field x_prev(u.grid(), u.dim());
  Field diff(u.grid(), u.dim());
  bool converged = false;
  for (int k = 1; k <= cfg.inner_max_iters; ++k) {
    XStepResult xs = x_step(state, problem);
    result.gs_sweeps += xs.sweeps;
    state.x = std::move(xs.x);
    state.z0 = z0_step(state, problem);
    state.z1 = z1_step(state, problem);
    auto [b0, b1] = b_update(state, problem);
    state.b0 = std::move(b0);
    state.b1 = std::move(b1);
    state.k = k;

    const auto xv = state.x.values();
    const auto pv = x_prev.values();
    auto dv = diff.values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] = xv[i] - pv[i];
    const double dn = h_delta_norm(diff);
    const double xn = h_delta_norm(state.x);
    result.iterations = k;
    result.rel_error = xn > 0.0 ? dn / xn : (dn == 0.0 ? 0.0 : INFINITY);
    if (cfg.track_objective) result.objective.push_back(localized_energy(state.x, problem));
    if (dn < cfg.inner_tol * xn || dn == 0.0) {
      converged = true;
      break;
    }
    std::copy(xv.begin(), xv.end(), x_prev.values().begin());
  }
  if (!converged) {
    throw ConvergenceError("split Bregman iteration did not converge", result.iterations,
                           result.rel_error);
  }
  kernels::project_cells(problem.kind(), u.values(), state.x.values(), problem.pinned(),
                         result.x.values());
  return result;
}

VpLocResult solve_vp_loc(ManifoldKind kind, const Field& u_prev, const SchemeConfig& cfg) {
  const VpLocProblem problem(kind, u_prev, cfg.tau, cfg);
  return solve_vp_loc(problem);
}

StepResult mm_step(ManifoldKind kind, const Field& u_prev, double tau,
                   const SchemeConfig& cfg, SBIState* warm) {
  const VpLocProblem problem(kind, u_prev, tau, cfg);
  VpLocResult inner = solve_vp_loc(problem, warm);
  Field next(u_prev.grid(), u_prev.dim());
  kernels::exp_cells(kind, u_prev.values(), inner.x.values(), next.values());
  for (std::size_t a = 0; a < next.size(); ++a) {
    if (raw::point_defect(kind, next.at(a)) > 1e-12) raw::retract(kind, next.at(a));
  }
  return {std::move(next), std::move(inner)};
}

StepResult mm_step(ManifoldKind kind, const Field& u_prev, const SchemeConfig& cfg) {
  return mm_step(kind, u_prev, cfg.tau, cfg);
}

std::vector<double> time_nodes(double t_end, double tau) {
  if (!(t_end > 0.0)) throw PreconditionError("T must be > 0");
  if (!(tau > 0.0)) throw PreconditionError("tau must be > 0");
  const double ratio = t_end / tau;
  const double nearest = std::round(ratio);
  const auto n = static_cast<std::size_t>(
      std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest : std::ceil(ratio));
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * tau;
  t[n] = t_end;
  return t;
}

Trajectory run_flow(ManifoldKind kind, const Field& u0, double t_end, const SchemeConfig& cfg) {
  cfg.validate();
  if (u0.dim() != ambient_dim(kind)) {
    throw PreconditionError("initial field dimension does not match the manifold");
  }
  if (max_point_defect(kind, u0) > 1e-8) {
    throw PreconditionError("initial field is not manifold-valued");
  }
  Trajectory traj;
  traj.kind = kind;
  traj.times = time_nodes(t_end, cfg.tau);
  traj.states.reserve(traj.times.size());
  traj.increments.reserve(traj.times.size() - 1);
  traj.states.push_back(u0);

  std::optional<SBIState> warm;
  if (cfg.warm_start) warm.emplace(u0.grid(), u0.dim());
  for (std::size_t n = 0; n + 1 < traj.times.size(); ++n) {
    const double step = traj.times[n + 1] - traj.times[n];
    StepResult r = mm_step(kind, traj.states.back(), step, cfg, warm ? &*warm : nullptr);
    StepRecord rec;
    rec.step = n + 1;
    rec.tau = step;
    rec.inner_iterations = r.inner.iterations;
    rec.rel_error = r.inner.rel_error;
    rec.gs_sweeps = r.inner.gs_sweeps;
    rec.energy = discrete_tv(r.u_next);
    rec.x_norm = h_delta_norm(r.inner.x);
    traj.records.push_back(rec);
    traj.increments.push_back(std::move(r.inner.x));
    traj.states.push_back(std::move(r.u_next));
  }
  return traj;
}

double max_point_defect(ManifoldKind kind, const Field& u) {
  double worst = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    worst = std::max(worst, raw::point_defect(kind, u.at(a)));
  }
  return worst;
}

}  // namespace tvflow
