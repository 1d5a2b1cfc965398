#pragma once

/// @file experiments.hpp
/// Experiment drivers behind the command line tool. Each run writes CSV
/// tables and a JSON report into its output directory and also returns the
/// data it wrote.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "tvflow/analysis.hpp"
#include "tvflow/geometry.hpp"
#include "tvflow/grid.hpp"
#include "tvflow/solver.hpp"

namespace tvflow {

enum class Experiment { S2Benchmark, ConvergenceStudy, So3, Custom };

std::string_view to_string(Experiment e);
Experiment experiment_from_string(std::string_view name);

/// Output directory override read by resolve_out_dir.
inline constexpr const char* kOutDirEnv = "TVFLOW_OUT_DIR";

struct ExperimentConfig {
  Experiment experiment = Experiment::S2Benchmark;
  std::size_t nx = 100;
  std::size_t ny = 0;  // 0 for a 1-D grid
  SchemeConfig scheme{};
  double t_end = 0.5;
  std::vector<double> taus;  // convergence study only
  std::vector<double> snapshots;
  std::filesystem::path out_dir = "out";
  double oracle_dt = 1e-6;
  std::uint64_t seed = 20240611;
  ManifoldKind manifold = ManifoldKind::SphereS2;  // custom only
  std::filesystem::path initial;                   // custom only

  /// Throws PreconditionError if the settings do not suit the experiment.
  void validate() const;
};

/// Defaults of each experiment (grid, boundary, step, horizon, snapshots).
ExperimentConfig default_config(Experiment e);

/// Sets one key. Keys: tau, rho, inner_tol, inner_max_iters, gs_tol,
/// gs_max_iters, boundary, warm_start, grid, t_end, taus, snapshots, out,
/// oracle_dt, seed, manifold, initial.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
/// Reads `key = value` lines; `#` starts a comment and quotes around values
/// are stripped.
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);
/// "100" -> (100, 0), "25x25" -> (25, 25).
std::pair<std::size_t, std::size_t> parse_grid(const std::string& text);
std::vector<double> parse_list(const std::string& text);

/// cfg.out_dir unless the environment override is set.
std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

GridPtr make_grid(const ExperimentConfig& cfg);

struct S2BenchmarkReport {
  Trajectory trajectory;
  std::vector<double> snapshot_times;
  std::vector<double> snapshot_errors;  // solver vs oracle in H_Delta
  DissipationReport dissipation;
  /// Largest deviation of the outer facets from a and b over all steps.
  double outer_facet_deviation = 0.0;
  /// Every step kept all interior edges of the three intervals in its facet.
  bool facets_preserved = true;
  double max_x_ratio = 0.0;  // max ||X_n|| / (tau lip)
  double lip = 0.0;
  nlohmann::json json;
  std::vector<std::filesystem::path> files;
};

S2BenchmarkReport run_s2_benchmark(const ExperimentConfig& cfg);

struct ConvergenceCase {
  double tau = 0.0;
  double error = 0.0;
  std::size_t steps = 0;
  int max_inner_iterations = 0;
  double max_x_ratio = 0.0;
  DissipationReport dissipation;
  double log_error_sq = 0.0;
  double log_bound = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceCase> cases;
  std::optional<ConvergenceFit> fit;
  ErrorConstants constants;
  double lip = 0.0;
  nlohmann::json json;
  std::vector<std::filesystem::path> files;
};

ConvergenceReport run_convergence_study(const ExperimentConfig& cfg);

struct So3Report {
  Trajectory trajectory;
  std::vector<double> snapshot_times;
  std::vector<double> snapshot_energy;
  std::vector<std::size_t> facet_counts;
  DissipationReport dissipation;
  double max_x_ratio = 0.0;
  double lip = 0.0;
  nlohmann::json json;
  std::vector<std::filesystem::path> files;
};

So3Report run_so3(const ExperimentConfig& cfg);

struct CustomReport {
  Trajectory trajectory;
  DissipationReport dissipation;
  nlohmann::json json;
  std::vector<std::filesystem::path> files;
};

CustomReport run_custom(const ExperimentConfig& cfg);

/// Facet tolerance used for reported facet counts.
inline constexpr double kFacetTol = 1e-6;

}  // namespace tvflow
