#pragma once

/// @file grid.hpp
/// Rectangular partitions of a 1-D or 2-D box, their interior edge sets,
/// piecewise-constant fields on cells and edges, the discrete gradient and
/// its weighted adjoint, and the discrete total variation.
///
/// Every inner product carries its measure weight: cell values are weighted
/// by the Lebesgue measure of the cell, edge values by the Hausdorff measure
/// of the shared face.

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tvflow {

struct Cell {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  double measure = 0.0;
  bool on_boundary = false;

  std::array<double, 2> center() const {
    return {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])};
  }
};

class RectPartition {
 public:
  /// cells must have positive measures; boundary flags are recomputed from
  /// the domain box [domain_lo, domain_hi].
  RectPartition(int dim, std::vector<Cell> cells, std::array<double, 2> domain_lo,
                std::array<double, 2> domain_hi);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  std::span<const Cell> cells() const noexcept { return cells_; }
  /// v(Omega_Delta): the smallest cell measure.
  double min_cell_measure() const noexcept { return min_measure_; }
  /// Lebesgue measure of the domain box.
  double domain_measure() const noexcept { return domain_measure_; }
  std::span<const double> measures() const noexcept { return measures_; }
  /// 1 for cells touching the domain boundary with positive measure.
  std::span<const unsigned char> boundary_mask() const noexcept { return boundary_; }

 private:
  int dim_;
  std::vector<Cell> cells_;
  std::vector<double> measures_;
  std::vector<unsigned char> boundary_;
  double min_measure_ = 0.0;
  double domain_measure_ = 0.0;
};

/// An interior face between cells lo < hi. Sign(lo) = +1 and Sign(hi) = -1,
/// so (D u)^edge = u^lo - u^hi.
struct Edge {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double measure = 0.0;
};

/// Incidence of one edge as seen from a cell.
struct Incidence {
  std::size_t edge;
  std::size_t neighbor;
  double sign;  // Sign_edge(cell)
};

class EdgeSet {
 public:
  EdgeSet(std::size_t n_cells, std::vector<Edge> edges);

  std::size_t size() const noexcept { return edges_.size(); }
  const Edge& edge(std::size_t i) const { return edges_[i]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> measures() const noexcept { return measures_; }
  /// Edges incident to a cell, in ascending edge order.
  std::span<const Incidence> incident(std::size_t cell) const {
    return {incidence_.data() + offsets_[cell], offsets_[cell + 1] - offsets_[cell]};
  }

 private:
  std::vector<Edge> edges_;
  std::vector<double> measures_;
  std::vector<std::size_t> offsets_;
  std::vector<Incidence> incidence_;
};

/// A partition together with its interior edges.
struct Grid {
  Grid(RectPartition p, EdgeSet e);

  RectPartition partition;
  EdgeSet edges;
  /// Number of divisions per axis for uniform builders (ny = 1 in 1-D).
  std::size_t nx = 0;
  std::size_t ny = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_uniform_1d(std::size_t n_cells, double length);
GridPtr build_uniform_2d(std::size_t nx, std::size_t ny, double lx, double ly);

/// Piecewise-constant map Omega -> R^dim (an element of H_Delta).
class Field {
 public:
  Field(GridPtr grid, std::size_t dim);
  Field(GridPtr grid, std::size_t dim, std::vector<double> values);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return grid_->partition.size(); }
  std::span<double> at(std::size_t cell) { return {values_.data() + cell * dim_, dim_}; }
  std::span<const double> at(std::size_t cell) const {
    return {values_.data() + cell * dim_, dim_};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  GridPtr grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

/// Piecewise-constant map on the interior edges (an element of H_{E Omega}).
class EdgeField {
 public:
  EdgeField(GridPtr grid, std::size_t dim);
  EdgeField(GridPtr grid, std::size_t dim, std::vector<double> values);

  const GridPtr& grid() const noexcept { return grid_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return grid_->edges.size(); }
  std::span<double> at(std::size_t edge) { return {values_.data() + edge * dim_, dim_}; }
  std::span<const double> at(std::size_t edge) const {
    return {values_.data() + edge * dim_, dim_};
  }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

 private:
  GridPtr grid_;
  std::size_t dim_;
  std::vector<double> values_;
};

void require_compatible(const Field& a, const Field& b);
void require_compatible(const EdgeField& a, const EdgeField& b);
void require_compatible(const Field& a, const EdgeField& b);

EdgeField discrete_gradient(const Field& u);
/// Adjoint of discrete_gradient w.r.t. the weighted inner products.
Field gradient_adjoint(const EdgeField& z);
double discrete_tv(const Field& u);
/// Upper bound on Lip(TV_Delta) in the H_Delta norm.
double lip_tv_upper(const Grid& grid);
/// Edges whose two cell values differ by at most tol (Euclidean).
std::vector<std::size_t> facet(const Field& u, double tol = 1e-9);

double h_delta_inner(const Field& u, const Field& v);
double h_delta_norm(const Field& u);
double edge_inner(const EdgeField& z, const EdgeField& w);
double edge_norm(const EdgeField& z);
/// Norm on H_1 = H_{E Omega} x H_Delta: z0 carries the edge norm and z1 the
/// cell norm.
double h1_norm(const EdgeField& z0, const Field& z1);

}  // namespace tvflow
