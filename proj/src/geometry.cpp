#include "tvflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tvflow/errors.hpp"

namespace tvflow {

namespace {

using RowMajor3 = Eigen::Matrix<double, 3, 3, Eigen::RowMajor>;
using ConstMap3 = Eigen::Map<const RowMajor3>;
using Map3 = Eigen::Map<RowMajor3>;

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

void require_size(ManifoldKind kind, std::size_t n, const char* what) {
  if (n != ambient_dim(kind)) {
    throw PreconditionError(std::string(what) + ": expected " +
                            std::to_string(ambient_dim(kind)) +
                            " ambient coordinates, got " + std::to_string(n));
  }
}

// Exact (up to rounding) Rodrigues evaluation; theta = |w|.
Matrix3 rodrigues(const Vector3& w) {
  const double theta = w.norm();
  if (theta == 0.0) return Matrix3::Identity();
  const Matrix3 k = skew(w);
  const double a = std::sin(theta) / theta;
  const double half = std::sin(0.5 * theta);
  const double b = 2.0 * half * half / (theta * theta);
  return Matrix3::Identity() + a * k + b * k * k;
}

Matrix3 polar_factor(const Matrix3& m) {
  // Newton iteration for the orthogonal polar factor; converges
  // quadratically from near-orthogonal input.
  if (m.determinant() > 0.0) {
    Matrix3 x = m;
    for (int it = 0; it < 30; ++it) {
      const Matrix3 next = 0.5 * (x + x.inverse().transpose());
      const double change = (next - x).norm();
      x = next;
      if (change <= 1e-15) break;
    }
    return x;
  }
  Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 u = svd.matrixU();
  const Matrix3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) *= -1.0;
  return u * v.transpose();
}

}  // namespace

std::string_view to_string(ManifoldKind kind) {
  return kind == ManifoldKind::SphereS2 ? "s2" : "so3";
}

ManifoldKind manifold_from_string(std::string_view name) {
  if (name == "s2" || name == "S2" || name == "sphere") return ManifoldKind::SphereS2;
  if (name == "so3" || name == "SO3" || name == "rotation") return ManifoldKind::RotationSO3;
  throw PreconditionError("unknown manifold '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
namespace raw {

double point_defect(ManifoldKind kind, std::span<const double> p) {
  if (kind == ManifoldKind::SphereS2) return std::abs(1.0 - norm(p));
  const Matrix3 r = ConstMap3(p.data());
  if (r.determinant() <= 0.0) return std::numeric_limits<double>::infinity();
  return (r.transpose() * r - Matrix3::Identity()).norm();
}

double tangent_defect(ManifoldKind kind, std::span<const double> p,
                      std::span<const double> v) {
  if (kind == ManifoldKind::SphereS2) return std::abs(dot(p, v));
  const Matrix3 a = ConstMap3(p.data()).transpose() * ConstMap3(v.data());
  return (0.5 * (a + a.transpose())).norm();
}

void tangent_project(ManifoldKind kind, std::span<const double> p,
                     std::span<const double> v, std::span<double> out) {
  if (kind == ManifoldKind::SphereS2) {
    const double s = p[0] * v[0] + p[1] * v[1] + p[2] * v[2];
    for (int i = 0; i < 3; ++i) out[i] = v[i] - s * p[i];
    return;
  }
  const ConstMap3 x(p.data());
  const ConstMap3 vm(v.data());
  const RowMajor3 r = 0.5 * (vm - x * vm.transpose() * x);
  Map3(out.data()) = r;
}

void exp_map(ManifoldKind kind, std::span<const double> p,
             std::span<const double> v, std::span<double> out) {
  if (std::all_of(v.begin(), v.end(), [](double c) { return c == 0.0; })) {
    std::copy(p.begin(), p.end(), out.begin());
    return;
  }
  if (kind == ManifoldKind::SphereS2) {
    const double n = norm(v);
    const double c = std::cos(n);
    const double s = std::sin(n) / n;
    for (int i = 0; i < 3; ++i) out[i] = c * p[i] + s * v[i];
    return;
  }
  const ConstMap3 x(p.data());
  const Matrix3 a = x.transpose() * ConstMap3(v.data());
  const Vector3 w = unskew(0.5 * (a - a.transpose()));
  const RowMajor3 r = x * rodrigues(w);
  Map3(out.data()) = r;
}

void retract(ManifoldKind kind, std::span<double> p) {
  if (kind == ManifoldKind::SphereS2) {
    const double n = norm(p);
    for (double& c : p) c /= n;
    return;
  }
  const RowMajor3 r = polar_factor(Map3(p.data()));
  Map3(p.data()) = r;
}

}  // namespace raw

// ---------------------------------------------------------------------------

ManifoldPoint ManifoldPoint::make(ManifoldKind kind, std::vector<double> coords) {
  require_size(kind, coords.size(), "ManifoldPoint");
  const double defect = raw::point_defect(kind, coords);
  if (!(defect <= kManifoldTol)) {
    throw PreconditionError("point is not on " + std::string(to_string(kind)) +
                            " (defect " + std::to_string(defect) + ")");
  }
  return ManifoldPoint(kind, std::move(coords));
}

ManifoldPoint ManifoldPoint::from_matrix(const Matrix3& r) {
  std::vector<double> c(9);
  Map3(c.data()) = r;
  return make(ManifoldKind::RotationSO3, std::move(c));
}

Matrix3 ManifoldPoint::matrix() const {
  if (kind_ != ManifoldKind::RotationSO3) {
    throw PreconditionError("matrix() requires an SO(3) point");
  }
  return ConstMap3(coords_.data());
}

TangentVector TangentVector::make(ManifoldPoint base, std::vector<double> coords) {
  require_size(base.kind(), coords.size(), "TangentVector");
  const double defect = raw::tangent_defect(base.kind(), base.coords(), coords);
  if (!(defect <= kManifoldTol)) {
    throw PreconditionError("vector is not tangent (defect " +
                            std::to_string(defect) + ")");
  }
  return TangentVector(std::move(base), std::move(coords));
}

double TangentVector::norm() const { return tvflow::norm(coords_); }

TangentVector tangent_project(const ManifoldPoint& p, std::span<const double> v) {
  require_size(p.kind(), v.size(), "tangent_project");
  std::vector<double> out(v.size());
  raw::tangent_project(p.kind(), p.coords(), v, out);
  return TangentVector::make(p, std::move(out));
}

std::vector<double> normal_project(const ManifoldPoint& p,
                                   std::span<const double> v) {
  require_size(p.kind(), v.size(), "normal_project");
  std::vector<double> t(v.size());
  raw::tangent_project(p.kind(), p.coords(), v, t);
  for (std::size_t i = 0; i < v.size(); ++i) t[i] = v[i] - t[i];
  return t;
}

ManifoldPoint exp_map(const TangentVector& v) {
  const auto kind = v.base().kind();
  std::vector<double> out(ambient_dim(kind));
  raw::exp_map(kind, v.base().coords(), v.coords(), out);
  return ManifoldPoint::make(kind, std::move(out));
}

Matrix3 skew(const Vector3& w) {
  Matrix3 k;
  k << 0.0, -w.z(), w.y(),  //
      w.z(), 0.0, -w.x(),   //
      -w.y(), w.x(), 0.0;
  return k;
}

Vector3 unskew(const Matrix3& w) { return {w(2, 1), w(0, 2), w(1, 0)}; }

Matrix3 matrix_exp_skew(const Matrix3& w) {
  if ((0.5 * (w + w.transpose())).norm() > kManifoldTol) {
    throw PreconditionError("matrix_exp_skew: argument is not skew-symmetric");
  }
  return rodrigues(unskew(0.5 * (w - w.transpose())));
}

ManifoldPoint geodesic_oracle(const TangentVector& v, double t_end, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("geodesic_oracle: dt must be positive");
  if (t_end < 0.0) throw PreconditionError("geodesic_oracle: t_end must be >= 0");
  const auto kind = v.base().kind();
  const double speed = v.norm();
  std::vector<double> x(v.base().coords().begin(), v.base().coords().end());
  if (speed == 0.0 || t_end == 0.0) return ManifoldPoint::make(kind, std::move(x));

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = t_end / static_cast<double>(steps);
  std::vector<double> vel(v.coords().begin(), v.coords().end());
  std::vector<double> tmp(vel.size());
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += h * vel[i];
    raw::retract(kind, x);
    raw::tangent_project(kind, x, vel, tmp);
    const double n = norm(tmp);
    for (std::size_t i = 0; i < vel.size(); ++i) vel[i] = tmp[i] * (speed / n);
  }
  return ManifoldPoint::make(kind, std::move(x));
}

EulerAngles raw::s2_euler_angles(std::span<const double> c) {
  const double theta = std::acos(clamp_unit(c[2]));
  const double rho = std::hypot(c[0], c[1]);
  if (rho == 0.0) return {theta, 0.0};
  const double sign = c[0] < 0.0 ? -1.0 : 1.0;
  return {theta, sign * std::acos(clamp_unit(c[1] / rho))};
}

EulerAngles s2_euler_angles(const ManifoldPoint& p) {
  if (p.kind() != ManifoldKind::SphereS2) {
    throw PreconditionError("s2_euler_angles requires an S^2 point");
  }
  return raw::s2_euler_angles(p.coords());
}

ManifoldPoint s2_from_euler(double theta, double phi) {
  std::vector<double> c = {std::sin(theta) * std::sin(phi),
                           std::sin(theta) * std::cos(phi), std::cos(theta)};
  return ManifoldPoint::make(ManifoldKind::SphereS2, std::move(c));
}

AxisAngle so3_axis_angle(const ManifoldPoint& r) {
  const Matrix3 m = r.matrix();
  const Vector3 anti = unskew(0.5 * (m - m.transpose()));  // sin(theta) e
  const double cos_theta = clamp_unit(0.5 * (m.trace() - 1.0));
  const double sin_theta = anti.norm();
  const double theta = std::atan2(sin_theta, cos_theta);
  if (theta < 1e-6) return {0.0, {0.0, 0.0, 1.0}};

  Vector3 e;
  if (std::numbers::pi - theta > 1e-3) {
    e = anti / sin_theta;
  } else {
    // (R + R^T)/2 = cos(theta) I + (1 - cos(theta)) e e^T
    const Matrix3 eet =
        (0.5 * (m + m.transpose()) - cos_theta * Matrix3::Identity()) /
        (1.0 - cos_theta);
    Eigen::Index k = 0;
    eet.diagonal().maxCoeff(&k);
    e = eet.col(k) / std::sqrt(eet(k, k));
    if (e.dot(anti) < 0.0) e = -e;
    e.normalize();
  }
  return {theta, {e.x(), e.y(), e.z()}};
}

ManifoldPoint rotation_from_axis_angle(double theta, std::span<const double> axis) {
  if (axis.size() != 3) throw PreconditionError("axis must have 3 components");
  const Vector3 e(axis[0], axis[1], axis[2]);
  if (std::abs(e.norm() - 1.0) > kManifoldTol) {
    throw PreconditionError("rotation_from_axis_angle: axis is not a unit vector");
  }
  const double c = std::cos(theta);
  const Matrix3 r = c * Matrix3::Identity() + (1.0 - c) * e * e.transpose() +
                    std::sin(theta) * skew(e);
  return ManifoldPoint::from_matrix(r);
}

// ---------------------------------------------------------------------------

ManifoldPoint random_point(ManifoldKind kind, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  if (kind == ManifoldKind::SphereS2) {
    std::vector<double> c(3);
    double n = 0.0;
    do {
      for (double& x : c) x = g(rng);
      n = norm(c);
    } while (n < 1e-12);
    for (double& x : c) x /= n;
    return ManifoldPoint::make(kind, std::move(c));
  }
  Eigen::Quaterniond q;
  do {
    q.coeffs() << g(rng), g(rng), g(rng), g(rng);
  } while (q.norm() < 1e-12);
  q.normalize();
  Matrix3 r = q.toRotationMatrix();
  std::vector<double> c(9);
  Map3(c.data()) = r;
  raw::retract(kind, c);
  return ManifoldPoint::make(kind, std::move(c));
}

TangentVector random_tangent(const ManifoldPoint& p, std::mt19937_64& rng,
                             double scale) {
  std::normal_distribution<double> g;
  std::vector<double> v(ambient_dim(p.kind()));
  for (double& x : v) x = scale * g(rng);
  return tangent_project(p, v);
}

double c_m_empirical(ManifoldKind kind, std::size_t n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = ambient_dim(kind);
  std::vector<double> diff(n), t(n);
  double best = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto p = random_point(kind, rng);
    const auto q = random_point(kind, rng);
    for (std::size_t i = 0; i < n; ++i) diff[i] = p.coords()[i] - q.coords()[i];
    const double d2 = dot(diff, diff);
    if (d2 < 1e-16) continue;
    raw::tangent_project(kind, p.coords(), diff, t);
    for (std::size_t i = 0; i < n; ++i) t[i] = diff[i] - t[i];
    best = std::max(best, norm(t) / d2);
  }
  return best;
}

namespace {

ManifoldConstants sample_so3_constants() {
  constexpr auto kind = ManifoldKind::RotationSO3;
  constexpr std::uint64_t seed = 0x5033;
  std::mt19937_64 rng(seed);
  ManifoldConstants mc;
  mc.source = ConstantsSource::Empirical;

  // Curv: |II_p(X,X)| / |X|^2 with II from a central second difference of
  // the geodesic t -> exp_p(tX).
  constexpr double h = 1e-3;
  std::vector<double> plus(9), minus(9), acc(9), tang(9), step(9);
  for (int s = 0; s < 10000; ++s) {
    const auto p = random_point(kind, rng);
    const auto x = random_tangent(p, rng);
    const double xn = x.norm();
    for (int i = 0; i < 9; ++i) step[i] = h * x.coords()[i];
    raw::exp_map(kind, p.coords(), step, plus);
    for (double& c : step) c = -c;
    raw::exp_map(kind, p.coords(), step, minus);
    for (int i = 0; i < 9; ++i) {
      acc[i] = (plus[i] - 2.0 * p.coords()[i] + minus[i]) / (h * h);
    }
    raw::tangent_project(kind, p.coords(), acc, tang);
    for (int i = 0; i < 9; ++i) tang[i] = acc[i] - tang[i];
    mc.curv = std::max(mc.curv, norm(tang) / (xn * xn));
  }
  for (int s = 0; s < 100000; ++s) {
    const auto p = random_point(kind, rng);
    const auto q = random_point(kind, rng);
    double d2 = 0.0;
    for (int i = 0; i < 9; ++i) {
      const double d = p.coords()[i] - q.coords()[i];
      d2 += d * d;
    }
    mc.diam = std::max(mc.diam, std::sqrt(d2));
  }
  mc.c_m_upper = 2.0 * c_m_empirical(kind, 1000000, seed);
  return mc;
}

}  // namespace

ManifoldConstants manifold_constants(ManifoldKind kind) {
  if (kind == ManifoldKind::SphereS2) {
    ManifoldConstants mc;
    mc.curv = 1.0;
    mc.diam = 2.0;
    mc.lfs = 1.0;
    const double ratio = std::max(1.0, mc.diam / *mc.lfs);
    mc.c_m_upper = 2.0 * mc.curv * ratio * ratio;
    mc.source = ConstantsSource::Analytic;
    return mc;
  }
  static const ManifoldConstants so3 = sample_so3_constants();
  return so3;
}

}  // namespace tvflow
