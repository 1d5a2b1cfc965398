#include "tvflow/kernels.hpp"

#include <cmath>
#include <numeric>
#include <vector>

namespace tvflow::kernels {

void shrink(std::span<const double> x, double gamma, std::span<double> out) {
  double n2 = 0.0;
  for (double c : x) n2 += c * c;
  const double n = std::sqrt(n2);
  if (n <= gamma || n == 0.0) {
    for (double& c : out) c = 0.0;
    return;
  }
  const double scale = (n - gamma) / n;
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = scale * x[i];
}

namespace {

inline void gradient_one(const Edge& e, std::size_t dim, const double* u, double* out) {
  const double* a = u + e.lo * dim;
  const double* b = u + e.hi * dim;
  for (std::size_t k = 0; k < dim; ++k) out[k] = a[k] - b[k];
}

inline void adjoint_one(const Grid& g, std::size_t cell, std::size_t dim,
                        const double* z, double* out) {
  const double inv = 1.0 / g.partition.cell(cell).measure;
  for (std::size_t k = 0; k < dim; ++k) out[k] = 0.0;
  for (const Incidence& inc : g.edges.incident(cell)) {
    const double w = inc.sign * g.edges.edge(inc.edge).measure * inv;
    const double* ze = z + inc.edge * dim;
    for (std::size_t k = 0; k < dim; ++k) out[k] += w * ze[k];
  }
}

inline double tv_term(const Grid& g, std::size_t e, std::size_t dim, const double* u) {
  const Edge& edge = g.edges.edge(e);
  const double* a = u + edge.lo * dim;
  const double* b = u + edge.hi * dim;
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s) * edge.measure;
}

inline double inner_term(std::size_t i, std::size_t dim, const double* w,
                         const double* a, const double* b) {
  double s = 0.0;
  for (std::size_t k = 0; k < dim; ++k) s += a[i * dim + k] * b[i * dim + k];
  return w[i] * s;
}

inline void project_one(ManifoldKind kind, std::size_t dim, std::size_t i,
                        std::span<const double> u, std::span<const double> v,
                        std::span<const unsigned char> mask, std::span<double> out) {
  auto o = out.subspan(i * dim, dim);
  if (!mask.empty() && mask[i] != 0) {
    for (double& c : o) c = 0.0;
    return;
  }
  raw::tangent_project(kind, u.subspan(i * dim, dim), v.subspan(i * dim, dim), o);
}

double ordered_sum(const std::vector<double>& terms) {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// OpenMP variants.

void gradient(const Grid& g, std::size_t dim, std::span<const double> u,
              std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.edges.size());
#pragma omp parallel for if (n * static_cast<std::ptrdiff_t>(dim) >= static_cast<std::ptrdiff_t>(kParallelThreshold))
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    gradient_one(g.edges.edge(e), dim, u.data(), out.data() + e * dim);
  }
}

void adjoint(const Grid& g, std::size_t dim, std::span<const double> z,
             std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(g.partition.size());
#pragma omp parallel for if (n * static_cast<std::ptrdiff_t>(dim) >= static_cast<std::ptrdiff_t>(kParallelThreshold))
  for (std::ptrdiff_t c = 0; c < n; ++c) {
    adjoint_one(g, c, dim, z.data(), out.data() + c * dim);
  }
}

void shrink_edges(std::size_t dim, std::span<const double> a, double gamma,
                  std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(a.size() / dim);
#pragma omp parallel for if (n * static_cast<std::ptrdiff_t>(dim) >= static_cast<std::ptrdiff_t>(kParallelThreshold))
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    shrink(a.subspan(e * dim, dim), gamma, out.subspan(e * dim, dim));
  }
}

void project_cells(ManifoldKind kind, std::span<const double> u,
                   std::span<const double> v, std::span<const unsigned char> mask,
                   std::span<double> out) {
  const std::size_t dim = ambient_dim(kind);
  const auto n = static_cast<std::ptrdiff_t>(u.size() / dim);
#pragma omp parallel for if (static_cast<std::size_t>(n) * dim >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) project_one(kind, dim, i, u, v, mask, out);
}

void bregman_update(std::span<double> b, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z) {
  const auto n = static_cast<std::ptrdiff_t>(b.size());
  if (y.empty()) {
#pragma omp parallel for if (n >= static_cast<std::ptrdiff_t>(kParallelThreshold))
    for (std::ptrdiff_t i = 0; i < n; ++i) b[i] += x[i] - z[i];
    return;
  }
#pragma omp parallel for if (n >= static_cast<std::ptrdiff_t>(kParallelThreshold))
  for (std::ptrdiff_t i = 0; i < n; ++i) b[i] += (x[i] + y[i]) - z[i];
}

double weighted_inner(std::size_t dim, std::span<const double> weights,
                      std::span<const double> a, std::span<const double> b) {
  const std::size_t n = weights.size();
  if (n * dim < kParallelThreshold) return serial::weighted_inner(dim, weights, a, b);
  std::vector<double> terms(n);
#pragma omp parallel for
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    terms[i] = inner_term(i, dim, weights.data(), a.data(), b.data());
  }
  return ordered_sum(terms);
}

double total_variation(const Grid& g, std::size_t dim, std::span<const double> u) {
  const std::size_t n = g.edges.size();
  if (n * dim < kParallelThreshold) return serial::total_variation(g, dim, u);
  std::vector<double> terms(n);
#pragma omp parallel for
  for (std::ptrdiff_t e = 0; e < static_cast<std::ptrdiff_t>(n); ++e) {
    terms[e] = tv_term(g, e, dim, u.data());
  }
  return ordered_sum(terms);
}

void exp_cells(ManifoldKind kind, std::span<const double> u,
               std::span<const double> x, std::span<double> out) {
  const std::size_t dim = ambient_dim(kind);
  const auto n = static_cast<std::ptrdiff_t>(u.size() / dim);
#pragma omp parallel for if (static_cast<std::size_t>(n) * dim >= kParallelThreshold)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    raw::exp_map(kind, u.subspan(i * dim, dim), x.subspan(i * dim, dim),
                 out.subspan(i * dim, dim));
  }
}

// ---------------------------------------------------------------------------
// Serial reference.

namespace serial {

void gradient(const Grid& g, std::size_t dim, std::span<const double> u,
              std::span<double> out) {
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    gradient_one(g.edges.edge(e), dim, u.data(), out.data() + e * dim);
  }
}

void adjoint(const Grid& g, std::size_t dim, std::span<const double> z,
             std::span<double> out) {
  for (std::size_t c = 0; c < g.partition.size(); ++c) {
    adjoint_one(g, c, dim, z.data(), out.data() + c * dim);
  }
}

void shrink_edges(std::size_t dim, std::span<const double> a, double gamma,
                  std::span<double> out) {
  for (std::size_t e = 0; e < a.size() / dim; ++e) {
    shrink(a.subspan(e * dim, dim), gamma, out.subspan(e * dim, dim));
  }
}

void project_cells(ManifoldKind kind, std::span<const double> u,
                   std::span<const double> v, std::span<const unsigned char> mask,
                   std::span<double> out) {
  const std::size_t dim = ambient_dim(kind);
  for (std::size_t i = 0; i < u.size() / dim; ++i) project_one(kind, dim, i, u, v, mask, out);
}

void bregman_update(std::span<double> b, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z) {
  if (y.empty()) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += x[i] - z[i];
    return;
  }
  for (std::size_t i = 0; i < b.size(); ++i) b[i] += (x[i] + y[i]) - z[i];
}

double weighted_inner(std::size_t dim, std::span<const double> weights,
                      std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    s += inner_term(i, dim, weights.data(), a.data(), b.data());
  }
  return s;
}

double total_variation(const Grid& g, std::size_t dim, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t e = 0; e < g.edges.size(); ++e) s += tv_term(g, e, dim, u.data());
  return s;
}

void exp_cells(ManifoldKind kind, std::span<const double> u,
               std::span<const double> x, std::span<double> out) {
  const std::size_t dim = ambient_dim(kind);
  for (std::size_t i = 0; i < u.size() / dim; ++i) {
    raw::exp_map(kind, u.subspan(i * dim, dim), x.subspan(i * dim, dim),
                 out.subspan(i * dim, dim));
  }
}

}  // namespace serial

}  // namespace tvflow::kernels
