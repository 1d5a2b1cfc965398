#pragma once

/// @file solver.hpp
/// Localized minimizing movement scheme for manifold-valued discrete TV
/// flows. Each time step minimizes
///
///   Phi_loc(X) = tau * TV(u + X) + 1/2 ||X||^2      over X in T_u M_Delta
///
/// by alternating split Bregman iteration, then moves every cell along the
/// geodesic u_a -> exp_{u_a}(X_a).

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "tvflow/geometry.hpp"
#include "tvflow/grid.hpp"

namespace tvflow {

enum class Boundary { Neumann, Dirichlet };

std::string_view to_string(Boundary b);
Boundary boundary_from_string(std::string_view name);

struct SchemeConfig {
  double tau = 1e-3;
  double rho = 0.1;
  double inner_tol = 1e-4;
  int inner_max_iters = 10000;
  double gs_tol = 1e-10;
  int gs_max_iters = 10000;
  Boundary boundary = Boundary::Neumann;
  /// Start each outer step from the previous step's Z and B instead of zero.
  bool warm_start = false;
  /// Record Phi_loc after every inner iteration (diagnostic; costs one TV
  /// evaluation per iteration).
  bool track_objective = false;

  /// Throws PreconditionError unless all parameters are in range.
  void validate() const;
};

/// Split Bregman iterate: X in H_Delta, Z = (Z0, Z1), B = (B0, B1) in
/// H_{E Omega} x H_Delta.
struct SBIState {
  SBIState(const GridPtr& grid, std::size_t dim);

  Field x;
  EdgeField z0;
  Field z1;
  EdgeField b0;
  Field b1;
  int k = 0;
};

/// Rows of the X-step system ((1+rho) I + rho M^{-1} D*D) X = rhs written as
/// diag_a X_a - sum_b coupling_ab X_b, in CSR layout.
struct GaussSeidelRows {
  std::vector<double> diag;
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbor;
  std::vector<double> coupling;
};

/// One localized subproblem: the base point u, the step length and the
/// configuration, with D u and the X-step rows cached.
class VpLocProblem {
 public:
  VpLocProblem(ManifoldKind kind, const Field& u_prev, double tau, const SchemeConfig& cfg);

  ManifoldKind kind() const noexcept { return kind_; }
  const Field& u_prev() const noexcept { return *u_prev_; }
  const EdgeField& grad_u_prev() const noexcept { return grad_u_; }
  double tau() const noexcept { return tau_; }
  const SchemeConfig& config() const noexcept { return *cfg_; }
  /// Cells pinned to zero increment (Dirichlet boundary); empty for Neumann.
  std::span<const unsigned char> pinned() const;
  const GaussSeidelRows& gs_rows() const noexcept { return rows_; }

 private:
  ManifoldKind kind_;
  const Field* u_prev_;
  EdgeField grad_u_;
  double tau_;
  const SchemeConfig* cfg_;
  GaussSeidelRows rows_;
};

/// Phi_loc(X; u_prev) = tau TV(u_prev + X) + 1/2 ||X||^2.
double localized_energy(const Field& x, const VpLocProblem& problem);

struct XStepResult {
  Field x;
  int sweeps = 0;
  double residual = 0.0;
};

/// Minimizes 1/2||X||^2 + rho/2 ||Z - W(X) - Y - B||^2_{H_1} over H_Delta by
/// Gauss-Seidel sweeps (ascending cell order) warm-started from state.x.
XStepResult x_step(const SBIState& state, const VpLocProblem& problem);
/// Edgewise shrinkage of D X + D u + B0 with threshold tau / rho.
EdgeField z0_step(const SBIState& state, const VpLocProblem& problem);
/// Cellwise tangent projection of X + B1 at u_prev.
Field z1_step(const SBIState& state, const VpLocProblem& problem);
/// B0 + D X + D u - Z0 and B1 + X - Z1.
std::pair<EdgeField, Field> b_update(const SBIState& state, const VpLocProblem& problem);

struct VpLocResult {
  Field x;
  int iterations = 0;
  double rel_error = 0.0;
  int gs_sweeps = 0;
  std::vector<double> objective;  // filled when track_objective is set
};

/// Runs the split Bregman iteration from `start` (or from zero) until
/// ||X_k - X_{k-1}|| < inner_tol ||X_k||. The result is projected onto
/// T_{u_prev} M_Delta. Throws ConvergenceError at the iteration cap.
VpLocResult solve_vp_loc(const VpLocProblem& problem, SBIState* start = nullptr);
VpLocResult solve_vp_loc(ManifoldKind kind, const Field& u_prev, const SchemeConfig& cfg);

struct StepResult {
  Field u_next;
  VpLocResult inner;
};

/// One step u_next = Exp_{u_prev}(X) with step length tau.
StepResult mm_step(ManifoldKind kind, const Field& u_prev, double tau,
                   const SchemeConfig& cfg, SBIState* warm = nullptr);
StepResult mm_step(ManifoldKind kind, const Field& u_prev, const SchemeConfig& cfg);

struct StepRecord {
  std::size_t step = 0;
  double tau = 0.0;
  int inner_iterations = 0;
  double rel_error = 0.0;
  int gs_sweeps = 0;
  double energy = 0.0;  // TV of the new state
  double x_norm = 0.0;
};

struct Trajectory {
  ManifoldKind kind = ManifoldKind::SphereS2;
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<Field> increments;
  std::vector<StepRecord> records;

  double t_end() const { return times.back(); }
  std::size_t steps() const { return increments.size(); }
};

/// Time nodes 0, tau, 2 tau, ..., T with the last interval shortened.
std::vector<double> time_nodes(double t_end, double tau);

/// Runs the scheme from u0 up to T.
Trajectory run_flow(ManifoldKind kind, const Field& u0, double t_end, const SchemeConfig& cfg);

/// Largest manifold-invariant defect over all cells of u.
double max_point_defect(ManifoldKind kind, const Field& u);

}  // namespace tvflow
