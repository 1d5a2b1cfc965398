#pragma once

/// @file kernels.hpp
/// Data-parallel inner loops of the solver: edgewise gradient / shrinkage,
/// cellwise adjoint / projection / Bregman updates and weighted reductions.
///
/// tvflow::kernels holds the OpenMP versions used by the solver;
/// tvflow::kernels::serial holds plain loops kept as the reference for tests
/// and the benchmark. Reductions evaluate per-element terms first and sum them
/// in index order, so both variants return bit-identical results.

#include <cstddef>
#include <span>

#include "tvflow/geometry.hpp"
#include "tvflow/grid.hpp"

namespace tvflow::kernels {

/// Problems below this many elements run on one thread.
inline constexpr std::size_t kParallelThreshold = 2048;

/// out^e = u^lo - u^hi.
void gradient(const Grid& g, std::size_t dim, std::span<const double> u,
              std::span<double> out);
/// out_a = (1/|cell a|) sum_e Sign_e(a) |e| z^e.
void adjoint(const Grid& g, std::size_t dim, std::span<const double> z,
             std::span<double> out);
/// out^e = shrink(a^e, gamma).
void shrink_edges(std::size_t dim, std::span<const double> a, double gamma,
                  std::span<double> out);
/// out_a = pi_{u_a}(v_a); cells with mask[a] != 0 are set to zero.
void project_cells(ManifoldKind kind, std::span<const double> u,
                   std::span<const double> v, std::span<const unsigned char> mask,
                   std::span<double> out);
/// b += x + y - z (y may be empty, meaning zero).
void bregman_update(std::span<double> b, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z);
/// sum_i w_i <a_i, b_i>.
double weighted_inner(std::size_t dim, std::span<const double> weights,
                      std::span<const double> a, std::span<const double> b);
/// sum_e |e| ||(D u)^e||.
double total_variation(const Grid& g, std::size_t dim, std::span<const double> u);
/// Cellwise exponential map.
void exp_cells(ManifoldKind kind, std::span<const double> u,
               std::span<const double> x, std::span<double> out);

namespace serial {

void gradient(const Grid& g, std::size_t dim, std::span<const double> u,
              std::span<double> out);
void adjoint(const Grid& g, std::size_t dim, std::span<const double> z,
             std::span<double> out);
void shrink_edges(std::size_t dim, std::span<const double> a, double gamma,
                  std::span<double> out);
void project_cells(ManifoldKind kind, std::span<const double> u,
                   std::span<const double> v, std::span<const unsigned char> mask,
                   std::span<double> out);
void bregman_update(std::span<double> b, std::span<const double> x,
                    std::span<const double> y, std::span<const double> z);
double weighted_inner(std::size_t dim, std::span<const double> weights,
                      std::span<const double> a, std::span<const double> b);
double total_variation(const Grid& g, std::size_t dim, std::span<const double> u);
void exp_cells(ManifoldKind kind, std::span<const double> u,
               std::span<const double> x, std::span<double> out);

}  // namespace serial

/// The shrinkage operator (x/|x|) max(|x| - gamma, 0); zero maps to zero.
void shrink(std::span<const double> x, double gamma, std::span<double> out);

}  // namespace tvflow::kernels
