#pragma once

/// @file field_io.hpp
/// CSV tables with one row per cell: index, cell center (x or x,y), then the
/// value columns. Numbers are written with 17 significant digits so that a
/// write/read cycle reproduces every double exactly.

#include <filesystem>
#include <string>
#include <vector>

#include "tvflow/geometry.hpp"
#include "tvflow/grid.hpp"

namespace tvflow {

/// Column names of manifold components: x1..x3 or r11..r33.
std::vector<std::string> component_names(ManifoldKind kind);

/// Shortest-safe decimal form ("%.17g").
std::string format_double(double v);

/// Writes a cellwise table; values holds columns.size() numbers per cell.
void write_cell_table(const std::filesystem::path& path, const Grid& grid,
                      const std::vector<std::string>& columns, const std::vector<double>& values);
void write_field_csv(const std::filesystem::path& path, const Field& u, ManifoldKind kind);

struct FieldTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a header column; throws if absent.
  std::size_t column(const std::string& name) const;
};

/// Parses any table written by write_cell_table. Throws std::runtime_error on
/// malformed input with the offending line number.
FieldTable read_table(const std::filesystem::path& path);

/// Reads a manifold field back onto grid, checking indices and centers.
Field read_field_csv(const std::filesystem::path& path, const GridPtr& grid, ManifoldKind kind);

}  // namespace tvflow
