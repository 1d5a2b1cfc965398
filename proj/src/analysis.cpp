#include "tvflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tvflow/errors.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {

Field rothe_interpolate(const Trajectory& traj, double t) {
  if (traj.states.empty()) throw PreconditionError("rothe_interpolate: empty trajectory");
  const double t0 = traj.times.front();
  const double t_end = traj.times.back();
  if (!(t >= t0 && t <= t_end)) {
    throw PreconditionError("rothe_interpolate: t=" + std::to_string(t) +
                            " outside [0, " + std::to_string(t_end) + "]");
  }
  if (t == t_end) return traj.states.back();
  // Interval n with t_n <= t < t_{n+1}.
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const auto n = static_cast<std::size_t>(it - traj.times.begin()) - 1;
  const double s = (t - traj.times[n]) / (traj.times[n + 1] - traj.times[n]);
  if (s == 0.0) return traj.states[n];

  const Field& u = traj.states[n];
  std::vector<double> scaled(traj.increments[n].values().begin(),
                             traj.increments[n].values().end());
  for (double& c : scaled) c *= s;
  Field out(u.grid(), u.dim());
  kernels::exp_cells(traj.kind, u.values(), scaled, out.values());
  return out;
}

std::vector<double> energy_series(const Trajectory& traj) {
  std::vector<double> e;
  e.reserve(traj.states.size());
  for (const Field& u : traj.states) e.push_back(discrete_tv(u));
  return e;
}

DissipationReport check_dissipation(const Trajectory& traj, double curv, double lip,
                                    double slack) {
  DissipationReport rep;
  double tau_max = 0.0;
  for (std::size_t n = 0; n + 1 < traj.times.size(); ++n) {
    tau_max = std::max(tau_max, traj.times[n + 1] - traj.times[n]);
  }
  rep.hypothesis_holds = tau_max * curv * lip <= 1.0;
  const auto e = energy_series(traj);
  for (std::size_t n = 0; n + 1 < e.size(); ++n) {
    const double inc = e[n + 1] - e[n];
    rep.max_increase = std::max(rep.max_increase, inc);
    if (inc > slack) {
      rep.monotone = false;
      rep.violations.push_back(n);
    }
  }
  return rep;
}

ErrorConstants error_constants(double c_m, double curv, double diam, double lip,
                               double v_min, double domain_measure) {
  if (c_m < 0.0 || curv < 0.0 || diam < 0.0 || lip < 0.0) {
    throw PreconditionError("error_constants: constants must be nonnegative");
  }
  if (!(v_min > 0.0) || !(domain_measure > 0.0)) {
    throw PreconditionError("error_constants: measures must be positive");
  }
  ErrorConstants c;
  c.c_m = c_m;
  c.curv = curv;
  c.diam = diam;
  c.lip = lip;
  c.v_min = v_min;
  c.domain_measure = domain_measure;
  const double inv_sqrt_v = 1.0 / std::sqrt(v_min);
  c.c0 = 2.0 * c_m * lip * inv_sqrt_v;
  c.c1 = (2.0 + diam * std::sqrt(domain_measure) * (2.0 * c_m / v_min + curv)) * lip * lip;
  c.c2 = (1.5 * curv + c_m * inv_sqrt_v) * lip * lip * lip;
  return c;
}

ErrorConstants error_constants(const ManifoldConstants& mc, double lip, double v_min,
                               double domain_measure) {
  return error_constants(mc.c_m_upper, mc.curv, mc.diam, lip, v_min, domain_measure);
}

double l2_error(const Field& u, const Field& v) {
  require_compatible(u, v);
  std::vector<double> d(u.values().begin(), u.values().end());
  const auto vv = v.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= vv[i];
  return h_delta_norm(Field(u.grid(), u.dim(), std::move(d)));
}

double error_bound(double t, double tau, double u0_gap, const ErrorConstants& c) {
  const double inner = u0_gap * u0_gap + t * (c.c1 * tau + c.c2 * tau * tau);
  if (inner == 0.0) return 0.0;
  return std::exp(c.c0 * t) * inner;
}

double log_error_bound(double t, double tau, double u0_gap, const ErrorConstants& c) {
  const double inner = u0_gap * u0_gap + t * (c.c1 * tau + c.c2 * tau * tau);
  if (inner <= 0.0) return -std::numeric_limits<double>::infinity();
  return c.c0 * t + std::log(inner);
}

ConvergenceFit fit_convergence_order(std::span<const double> taus,
                                     std::span<const double> errors) {
  if (taus.size() != errors.size()) throw PreconditionError("fit: size mismatch");
  if (taus.size() < 2) throw PreconditionError("fit: need at least two points");
  const auto n = static_cast<double>(taus.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> x(taus.size()), y(taus.size());
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!(taus[i] > 0.0) || !(errors[i] > 0.0)) {
      throw PreconditionError("fit: taus and errors must be positive");
    }
    x[i] = std::log(taus[i]);
    y[i] = std::log(errors[i]);
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit: taus must not all be equal");
  ConvergenceFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

}  // namespace tvflow
