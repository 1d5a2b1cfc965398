#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tvflow/geometry.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/solver.hpp"

namespace tvflow {

/// Constants of the a priori error estimate together with their inputs.
struct ErrorConstants {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double c_m = 0.0;
  double lip = 0.0;
  double v_min = 0.0;
  double curv = 0.0;
  double diam = 0.0;
  double domain_measure = 0.0;
};

/// Geodesic interpolation between time nodes. Inside step n the state is
/// Exp_{u_n}(s X_n) with s = (t - t_n) / (t_{n+1} - t_n).
Field rothe_interpolate(const Trajectory& traj, double t);

/// TV of every stored state.
std::vector<double> energy_series(const Trajectory& traj);

struct DissipationReport {
  /// tau_max * curv * lip <= 1.
  bool hypothesis_holds = false;
  /// TV(u_{n+1}) <= TV(u_n) + slack for every n.
  bool monotone = true;
  double max_increase = 0.0;
  std::vector<std::size_t> violations;  // indices n with TV(u_{n+1}) > TV(u_n) + slack
};

DissipationReport check_dissipation(const Trajectory& traj, double curv, double lip,
                                    double slack = 1e-10);

ErrorConstants error_constants(double c_m, double curv, double diam, double lip,
                               double v_min, double domain_measure);
/// Uses c_m_upper, curv and diam of the manifold constants.
ErrorConstants error_constants(const ManifoldConstants& mc, double lip, double v_min,
                               double domain_measure);

/// ||u - v||_{H_Delta}.
double l2_error(const Field& u, const Field& v);
/// Right-hand side of the squared-error estimate:
/// e^{C0 t} gap^2 + t e^{C0 t} (C1 tau + C2 tau^2). May overflow to +inf.
double error_bound(double t, double tau, double u0_gap, const ErrorConstants& c);
/// Natural logarithm of error_bound, finite whenever the bound is positive.
double log_error_bound(double t, double tau, double u0_gap, const ErrorConstants& c);

struct ConvergenceFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of log(error) against log(tau).
ConvergenceFit fit_convergence_order(std::span<const double> taus,
                                     std::span<const double> errors);

}  // namespace tvflow
