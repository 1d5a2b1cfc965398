#pragma once

/// @file geometry.hpp
/// Target manifolds S^2 (in R^3) and SO(3) (flattened row-major in R^9).
///
/// Two layers are exposed. The checked layer works on ManifoldPoint and
/// TangentVector values and validates the manifold invariants. The raw layer
/// (namespace tvflow::raw) works on spans of ambient coordinates without any
/// validation and is what the per-cell solver kernels call.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace tvflow {

enum class ManifoldKind { SphereS2, RotationSO3 };

constexpr std::size_t ambient_dim(ManifoldKind kind) {
  return kind == ManifoldKind::SphereS2 ? 3 : 9;
}

std::string_view to_string(ManifoldKind kind);
ManifoldKind manifold_from_string(std::string_view name);

/// Tolerance used by the point and tangent invariants.
inline constexpr double kManifoldTol = 1e-10;

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

class ManifoldPoint {
 public:
  /// Throws PreconditionError if coords has the wrong size or is off M.
  static ManifoldPoint make(ManifoldKind kind, std::vector<double> coords);
  static ManifoldPoint from_matrix(const Matrix3& r);

  ManifoldKind kind() const noexcept { return kind_; }
  std::span<const double> coords() const noexcept { return coords_; }
  Matrix3 matrix() const;  // SO(3) only

 private:
  ManifoldPoint(ManifoldKind kind, std::vector<double> coords)
      : kind_(kind), coords_(std::move(coords)) {}
  ManifoldKind kind_;
  std::vector<double> coords_;
};

class TangentVector {
 public:
  /// Throws PreconditionError if coords is not tangent at base.
  static TangentVector make(ManifoldPoint base, std::vector<double> coords);

  const ManifoldPoint& base() const noexcept { return base_; }
  std::span<const double> coords() const noexcept { return coords_; }
  double norm() const;

 private:
  TangentVector(ManifoldPoint base, std::vector<double> coords)
      : base_(std::move(base)), coords_(std::move(coords)) {}
  ManifoldPoint base_;
  std::vector<double> coords_;
};

struct EulerAngles {
  double theta;
  double phi;
};

struct AxisAngle {
  double theta;
  std::array<double, 3> axis;
};

enum class ConstantsSource { Analytic, Empirical };

/// Curv(M), Diam(M), lfs(M) and the upper bound on C_M.
/// For analytic constants c_m_upper = 2 curv max(1, diam/lfs)^2.
/// For SO(3) lfs is not available and the constants are sampled.
struct ManifoldConstants {
  double curv = 0.0;
  double diam = 0.0;
  std::optional<double> lfs;
  double c_m_upper = 0.0;
  ConstantsSource source = ConstantsSource::Analytic;
};

// ---------------------------------------------------------------------------
// Raw span-level primitives (no validation).
namespace raw {

/// Distance of p from M: |1 - |p|| for S^2, ||R^T R - I||_F (+ orientation
/// penalty) for SO(3).
double point_defect(ManifoldKind kind, std::span<const double> p);
/// |<p, v>| for S^2, ||sym(p^T v)||_F for SO(3).
double tangent_defect(ManifoldKind kind, std::span<const double> p,
                      std::span<const double> v);

void tangent_project(ManifoldKind kind, std::span<const double> p,
                     std::span<const double> v, std::span<double> out);
void exp_map(ManifoldKind kind, std::span<const double> p,
             std::span<const double> v, std::span<double> out);
/// Nearest-point projection onto M (normalization / polar factor).
void retract(ManifoldKind kind, std::span<double> p);
/// Euler angles of any nonzero vector of R^3 (the formula of s2_euler_angles
/// without the membership check).
EulerAngles s2_euler_angles(std::span<const double> c);

}  // namespace raw

// ---------------------------------------------------------------------------
// Checked operations.

TangentVector tangent_project(const ManifoldPoint& p, std::span<const double> v);
std::vector<double> normal_project(const ManifoldPoint& p,
                                   std::span<const double> v);
ManifoldPoint exp_map(const TangentVector& v);

/// exp of a skew matrix via Rodrigues' formula; throws if W is not skew.
Matrix3 matrix_exp_skew(const Matrix3& w);
Matrix3 skew(const Vector3& w);
Vector3 unskew(const Matrix3& w);

/// Integrates the geodesic equation by projected explicit Euler.
ManifoldPoint geodesic_oracle(const TangentVector& v, double t_end, double dt);

EulerAngles s2_euler_angles(const ManifoldPoint& p);
ManifoldPoint s2_from_euler(double theta, double phi);

AxisAngle so3_axis_angle(const ManifoldPoint& r);
ManifoldPoint rotation_from_axis_angle(double theta, std::span<const double> axis);

ManifoldConstants manifold_constants(ManifoldKind kind);
/// max over sampled pairs of ||pi_perp_p(p - q)|| / ||p - q||^2.
double c_m_empirical(ManifoldKind kind, std::size_t n_samples,
                     std::uint64_t seed = 20240611);

// Sampling helpers (uniform on S^2 / Haar on SO(3)).
ManifoldPoint random_point(ManifoldKind kind, std::mt19937_64& rng);
TangentVector random_tangent(const ManifoldPoint& p, std::mt19937_64& rng,
                             double scale = 1.0);

}  // namespace tvflow
