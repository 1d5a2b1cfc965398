#include "tvflow/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvflow/errors.hpp"

namespace tvflow {

std::vector<std::string> component_names(ManifoldKind kind) {
  if (kind == ManifoldKind::SphereS2) return {"x1", "x2", "x3"};
  std::vector<std::string> names;
  for (int i = 1; i <= 3; ++i) {
    for (int j = 1; j <= 3; ++j) names.push_back("r" + std::to_string(i) + std::to_string(j));
  }
  return names;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_cell_table(const std::filesystem::path& path, const Grid& grid,
                      const std::vector<std::string>& columns, const std::vector<double>& values) {
  const std::size_t n = grid.partition.size();
  const std::size_t k = columns.size();
  if (values.size() != n * k) throw PreconditionError("write_cell_table: value count mismatch");
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");

  const bool two_d = grid.partition.dim() == 2;
  out << "index,x";
  if (two_d) out << ",y";
  for (const auto& c : columns) out << ',' << c;
  out << '\n';
  for (std::size_t a = 0; a < n; ++a) {
    const auto c = grid.partition.cell(a).center();
    out << a << ',' << format_double(c[0]);
    if (two_d) out << ',' << format_double(c[1]);
    for (std::size_t j = 0; j < k; ++j) out << ',' << format_double(values[a * k + j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const Field& u, ManifoldKind kind) {
  if (u.dim() != ambient_dim(kind)) throw PreconditionError("field dimension mismatch");
  write_cell_table(path, *u.grid(), component_names(kind),
                   std::vector<double>(u.values().begin(), u.values().end()));
}

std::size_t FieldTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::runtime_error("missing column '" + name + "'");
}

FieldTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  FieldTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (cell.empty() || *end != '\0') {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                 ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (row.size() != t.header.size()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected " + std::to_string(t.header.size()) + " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid, ManifoldKind kind) {
  const FieldTable t = read_table(path);
  const auto names = component_names(kind);
  const std::size_t n = grid->partition.size();
  if (t.rows.size() != n) {
    throw std::runtime_error(path.string() + ": expected " + std::to_string(n) + " rows");
  }
  const std::size_t idx = t.column("index");
  const std::size_t cx = t.column("x");
  const bool two_d = grid->partition.dim() == 2;
  const std::size_t cy = two_d ? t.column("y") : 0;
  std::vector<std::size_t> cols;
  for (const auto& name : names) cols.push_back(t.column(name));

  Field u(grid, names.size());
  for (std::size_t a = 0; a < n; ++a) {
    const auto& row = t.rows[a];
    if (row[idx] != static_cast<double>(a)) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(a) + " has wrong index");
    }
    const auto c = grid->partition.cell(a).center();
    if (std::abs(row[cx] - c[0]) > 1e-9 || (two_d && std::abs(row[cy] - c[1]) > 1e-9)) {
      throw std::runtime_error(path.string() + ": cell " + std::to_string(a) +
                               " center does not match the grid");
    }
    for (std::size_t k = 0; k < cols.size(); ++k) u.at(a)[k] = row[cols[k]];
  }
  return u;
}

}  // namespace tvflow
