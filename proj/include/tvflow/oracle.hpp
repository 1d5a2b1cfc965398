#pragma once

/// @file oracle.hpp
/// Reference data for validating the solver: the three-facet S^2 flow whose
/// middle facet h(t) = (h1, 0, h3) solves
///
///   d/dt (h1, h3) = -sqrt(2) a1 / (c sqrt(1 - a1 h1)) (h1^2 - 1, h1 h3),
///
/// integrated by explicit Euler, and the initial data of both experiments.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "tvflow/grid.hpp"

namespace tvflow {

/// u0 = a on (0, l1), h0 on (l1, l2), b on (l2, L) with a = (a1, a2, 0),
/// b = (a1, -a2, 0).
struct BenchmarkSpec {
  double a1 = 0.0;
  double a2 = 0.0;
  std::array<double, 3> h0{};
  double l1 = 0.0;
  double l2 = 0.0;
  double length = 1.0;

  double c() const { return l2 - l1; }
  std::array<double, 3> a() const { return {a1, a2, 0.0}; }
  std::array<double, 3> b() const { return {a1, -a2, 0.0}; }
  /// Throws PreconditionError if the fields violate their constraints.
  void validate() const;
};

/// a = (1/sqrt2, 1/sqrt2, 0), h0 = (1/sqrt2, 0, 1/sqrt2), breakpoints 2/5, 3/5
/// on (0, 1).
BenchmarkSpec default_benchmark();

struct HPoint {
  double h1;
  double h3;
};

/// Right-hand side of the middle-facet ODE. Throws on 1 - a1 h1 <= 0.
HPoint ode_h_rhs(HPoint h, const BenchmarkSpec& spec);
HPoint ode_h_step(HPoint h, const BenchmarkSpec& spec, double dt);

struct OdeSolution {
  HPoint h{};
  std::size_t steps = 0;
  /// max | h1^2 + h3^2 - 1 | along the path (reported, never corrected).
  double max_drift = 0.0;
  /// h1 increased at every step.
  bool h1_strictly_increasing = true;
};

OdeSolution ode_h_integrate(const BenchmarkSpec& spec, double t_end, double dt);
/// h at each of the (ascending) sample times from one integration pass.
std::vector<HPoint> ode_h_sample(const BenchmarkSpec& spec, std::span<const double> times,
                                 double dt);

/// Three-facet field on a 1-D grid with the middle facet from the ODE.
Field exact_flow(const BenchmarkSpec& spec, const GridPtr& grid, double t, double dt);
Field facet_field(const BenchmarkSpec& spec, const GridPtr& grid, HPoint h);

/// S^2 initial data built from the tabulated Euler angles.
Field build_s2_benchmark_initial(const GridPtr& grid);
/// SO(3) initial data on (0,1)^2 from the tabulated axis-angle blocks.
Field build_so3_initial(const GridPtr& grid);

/// Tabulated block angles (theta, phi, psi) of the SO(3) experiment,
/// indexed [i][j] for I_i x J_j.
struct So3BlockAngles {
  std::array<std::array<double, 3>, 3> theta;
  std::array<std::array<double, 3>, 3> phi;
  std::array<std::array<double, 3>, 3> psi;
};
So3BlockAngles so3_block_angles();

}  // namespace tvflow
