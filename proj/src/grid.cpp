#include "tvflow/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tvflow/errors.hpp"
#include "tvflow/kernels.hpp"

namespace tvflow {

RectPartition::RectPartition(int dim, std::vector<Cell> cells,
                             std::array<double, 2> domain_lo,
                             std::array<double, 2> domain_hi)
    : dim_(dim), cells_(std::move(cells)) {
  if (dim != 1 && dim != 2) throw PreconditionError("partition dimension must be 1 or 2");
  if (cells_.empty()) throw PreconditionError("partition needs at least one cell");
  domain_measure_ = 1.0;
  for (int d = 0; d < dim_; ++d) {
    if (!(domain_hi[d] > domain_lo[d])) throw PreconditionError("empty domain box");
    domain_measure_ *= domain_hi[d] - domain_lo[d];
  }
  min_measure_ = std::numeric_limits<double>::infinity();
  measures_.reserve(cells_.size());
  boundary_.reserve(cells_.size());
  for (Cell& c : cells_) {
    if (!(c.measure > 0.0)) throw PreconditionError("cell measures must be positive");
    bool touches = false;
    for (int d = 0; d < dim_; ++d) {
      touches = touches || c.lo[d] <= domain_lo[d] || c.hi[d] >= domain_hi[d];
    }
    c.on_boundary = touches;
    measures_.push_back(c.measure);
    boundary_.push_back(touches ? 1 : 0);
    min_measure_ = std::min(min_measure_, c.measure);
  }
}

EdgeSet::EdgeSet(std::size_t n_cells, std::vector<Edge> edges) : edges_(std::move(edges)) {
  std::vector<std::size_t> count(n_cells, 0);
  measures_.reserve(edges_.size());
  for (Edge& e : edges_) {
    if (e.lo == e.hi) throw PreconditionError("edge must join two distinct cells");
    if (e.lo > e.hi) std::swap(e.lo, e.hi);
    if (e.hi >= n_cells) throw PreconditionError("edge refers to a missing cell");
    if (!(e.measure > 0.0)) throw PreconditionError("edge measure must be positive");
    ++count[e.lo];
    ++count[e.hi];
    measures_.push_back(e.measure);
  }
  offsets_.assign(n_cells + 1, 0);
  for (std::size_t c = 0; c < n_cells; ++c) offsets_[c + 1] = offsets_[c] + count[c];
  incidence_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    incidence_[fill[e.lo]++] = {i, e.hi, +1.0};
    incidence_[fill[e.hi]++] = {i, e.lo, -1.0};
  }
}

Grid::Grid(RectPartition p, EdgeSet e) : partition(std::move(p)), edges(std::move(e)) {}

GridPtr build_uniform_1d(std::size_t n_cells, double length) {
  if (n_cells == 0) throw PreconditionError("build_uniform_1d: n_cells must be >= 1");
  if (!(length > 0.0)) throw PreconditionError("build_uniform_1d: length must be > 0");
  const double h = length / static_cast<double>(n_cells);
  std::vector<Cell> cells(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    cells[i].lo = {static_cast<double>(i) * h, 0.0};
    cells[i].hi = {i + 1 == n_cells ? length : static_cast<double>(i + 1) * h, 0.0};
    cells[i].measure = h;
  }
  std::vector<Edge> edges;
  edges.reserve(n_cells - 1);
  for (std::size_t i = 0; i + 1 < n_cells; ++i) edges.push_back({i, i + 1, 1.0});
  auto grid = std::make_shared<Grid>(
      RectPartition(1, std::move(cells), {0.0, 0.0}, {length, 0.0}),
      EdgeSet(n_cells, std::move(edges)));
  grid->nx = n_cells;
  grid->ny = 1;
  return grid;
}

GridPtr build_uniform_2d(std::size_t nx, std::size_t ny, double lx, double ly) {
  if (nx == 0 || ny == 0) throw PreconditionError("build_uniform_2d: divisions must be >= 1");
  if (!(lx > 0.0) || !(ly > 0.0)) throw PreconditionError("build_uniform_2d: lengths must be > 0");
  const double hx = lx / static_cast<double>(nx);
  const double hy = ly / static_cast<double>(ny);
  // Cell (ix, iy) has index iy * nx + ix.
  std::vector<Cell> cells(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      Cell& c = cells[iy * nx + ix];
      c.lo = {static_cast<double>(ix) * hx, static_cast<double>(iy) * hy};
      c.hi = {ix + 1 == nx ? lx : static_cast<double>(ix + 1) * hx,
              iy + 1 == ny ? ly : static_cast<double>(iy + 1) * hy};
      c.measure = hx * hy;
    }
  }
  std::vector<Edge> edges;
  edges.reserve((nx - 1) * ny + nx * (ny - 1));
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
      edges.push_back({iy * nx + ix, iy * nx + ix + 1, hy});
    }
  }
  for (std::size_t iy = 0; iy + 1 < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      edges.push_back({iy * nx + ix, (iy + 1) * nx + ix, hx});
    }
  }
  auto grid = std::make_shared<Grid>(
      RectPartition(2, std::move(cells), {0.0, 0.0}, {lx, ly}),
      EdgeSet(nx * ny, std::move(edges)));
  grid->nx = nx;
  grid->ny = ny;
  return grid;
}

// ---------------------------------------------------------------------------

Field::Field(GridPtr grid, std::size_t dim)
    : grid_(std::move(grid)), dim_(dim), values_(grid_->partition.size() * dim, 0.0) {}

Field::Field(GridPtr grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != grid_->partition.size() * dim_) {
    throw PreconditionError("Field: expected " +
                            std::to_string(grid_->partition.size() * dim_) +
                            " values, got " + std::to_string(values_.size()));
  }
}

EdgeField::EdgeField(GridPtr grid, std::size_t dim)
    : grid_(std::move(grid)), dim_(dim), values_(grid_->edges.size() * dim, 0.0) {}

EdgeField::EdgeField(GridPtr grid, std::size_t dim, std::vector<double> values)
    : grid_(std::move(grid)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != grid_->edges.size() * dim_) {
    throw PreconditionError("EdgeField: expected " +
                            std::to_string(grid_->edges.size() * dim_) +
                            " values, got " + std::to_string(values_.size()));
  }
}

void require_compatible(const Field& a, const Field& b) {
  if (a.grid() != b.grid() || a.dim() != b.dim()) {
    throw PreconditionError("fields live on different discretizations");
  }
}

void require_compatible(const EdgeField& a, const EdgeField& b) {
  if (a.grid() != b.grid() || a.dim() != b.dim()) {
    throw PreconditionError("edge fields live on different discretizations");
  }
}

void require_compatible(const Field& a, const EdgeField& b) {
  if (a.grid() != b.grid() || a.dim() != b.dim()) {
    throw PreconditionError("field and edge field live on different discretizations");
  }
}

EdgeField discrete_gradient(const Field& u) {
  EdgeField out(u.grid(), u.dim());
  kernels::gradient(*u.grid(), u.dim(), u.values(), out.values());
  return out;
}

Field gradient_adjoint(const EdgeField& z) {
  Field out(z.grid(), z.dim());
  kernels::adjoint(*z.grid(), z.dim(), z.values(), out.values());
  return out;
}

double discrete_tv(const Field& u) {
  return kernels::total_variation(*u.grid(), u.dim(), u.values());
}

double lip_tv_upper(const Grid& grid) {
  double s = 0.0;
  for (const Edge& e : grid.edges.edges()) {
    s += e.measure * e.measure *
         (1.0 / grid.partition.cell(e.lo).measure + 1.0 / grid.partition.cell(e.hi).measure);
  }
  return std::sqrt(s);
}

std::vector<std::size_t> facet(const Field& u, double tol) {
  if (tol < 0.0) throw PreconditionError("facet: tol must be >= 0");
  std::vector<std::size_t> out;
  const auto& edges = u.grid()->edges;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto a = u.at(edges.edge(i).lo);
    const auto b = u.at(edges.edge(i).hi);
    double s = 0.0;
    for (std::size_t k = 0; k < u.dim(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    if (std::sqrt(s) <= tol) out.push_back(i);
  }
  return out;
}

double h_delta_inner(const Field& u, const Field& v) {
  require_compatible(u, v);
  return kernels::weighted_inner(u.dim(), u.grid()->partition.measures(), u.values(),
                                 v.values());
}

double h_delta_norm(const Field& u) { return std::sqrt(h_delta_inner(u, u)); }

double edge_inner(const EdgeField& z, const EdgeField& w) {
  require_compatible(z, w);
  return kernels::weighted_inner(z.dim(), z.grid()->edges.measures(), z.values(),
                                 w.values());
}

double edge_norm(const EdgeField& z) { return std::sqrt(edge_inner(z, z)); }

double h1_norm(const EdgeField& z0, const Field& z1) {
  require_compatible(z1, z0);
  const double a = edge_norm(z0);
  const double b = h_delta_norm(z1);
  return std::sqrt(a * a + b * b);
}

}  // namespace tvflow
