#include "tvflow/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "tvflow/errors.hpp"
#include "tvflow/field_io.hpp"
#include "tvflow/oracle.hpp"

#ifndef TVFLOW_VERSION
#define TVFLOW_VERSION "unknown"
#endif

namespace tvflow {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::S2Benchmark: return "s2-benchmark";
    case Experiment::ConvergenceStudy: return "convergence-study";
    case Experiment::So3: return "so3-2d";
    case Experiment::Custom: return "custom";
  }
  return "?";
}

Experiment experiment_from_string(std::string_view name) {
  if (name == "s2-benchmark") return Experiment::S2Benchmark;
  if (name == "convergence-study" || name == "convergence") return Experiment::ConvergenceStudy;
  if (name == "so3-2d" || name == "so3") return Experiment::So3;
  if (name == "custom") return Experiment::Custom;
  throw PreconditionError("unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(Experiment e) {
  ExperimentConfig c;
  c.experiment = e;
  switch (e) {
    case Experiment::S2Benchmark:
      c.scheme.boundary = Boundary::Dirichlet;
      c.t_end = 0.5;
      c.snapshots = {0.0, 0.07, 0.14, 0.21, 0.5};
      break;
    case Experiment::ConvergenceStudy:
      c.scheme.boundary = Boundary::Dirichlet;
      c.t_end = 0.2;
      c.taus = {1e-1, 1e-2, 1e-3, 1e-4};
      break;
    case Experiment::So3:
      c.nx = 25;
      c.ny = 25;
      c.t_end = 1.0;
      c.snapshots = {0.0, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0};
      break;
    case Experiment::Custom:
      c.t_end = 0.1;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  scheme.validate();
  if (nx == 0) throw PreconditionError("grid must have at least one cell");
  if (!(t_end > 0.0)) throw PreconditionError("t_end must be > 0");
  if (!(oracle_dt > 0.0)) throw PreconditionError("oracle_dt must be > 0");
  for (double s : snapshots) {
    if (s < 0.0 || s > t_end) throw PreconditionError("snapshot times must lie in [0, t_end]");
  }
  if (!std::is_sorted(snapshots.begin(), snapshots.end())) {
    throw PreconditionError("snapshot times must be ascending");
  }
  switch (experiment) {
    case Experiment::S2Benchmark:
      if (ny != 0) throw PreconditionError("s2-benchmark needs a 1-D grid");
      break;
    case Experiment::ConvergenceStudy:
      if (ny != 0) throw PreconditionError("convergence study needs a 1-D grid");
      if (taus.empty()) throw PreconditionError("convergence study needs at least one tau");
      for (double t : taus) {
        if (!(t > 0.0)) throw PreconditionError("every tau must be > 0");
      }
      break;
    case Experiment::So3:
      if (ny == 0) throw PreconditionError("so3 needs a 2-D grid");
      break;
    case Experiment::Custom:
      if (initial.empty()) throw PreconditionError("custom needs an initial field file");
      break;
  }
}

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  s.erase(0, s.find_first_not_of(ws));
  const auto last = s.find_last_not_of(ws);
  s.erase(last == std::string::npos ? 0 : last + 1);
  return s;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0') throw PreconditionError(key + ": not a number: '" + text + "'");
  return v;
}

long long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || *end != '\0') throw PreconditionError(key + ": not an integer: '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw PreconditionError(key + ": expected true or false");
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  const auto x = t.find('x');
  if (x == std::string::npos) {
    const long long n = parse_int("grid", t);
    if (n <= 0) throw PreconditionError("grid: cell count must be positive");
    return {static_cast<std::size_t>(n), 0};
  }
  const long long nx = parse_int("grid", t.substr(0, x));
  const long long ny = parse_int("grid", t.substr(x + 1));
  if (nx <= 0 || ny <= 0) throw PreconditionError("grid: cell counts must be positive");
  return {static_cast<std::size_t>(nx), static_cast<std::size_t>(ny)};
}

std::vector<double> parse_list(const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '[') t.erase(0, 1);
  if (!t.empty() && t.back() == ']') t.pop_back();
  std::vector<double> out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double("list", item));
  }
  return out;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  std::string value = trim(value_in);
  if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') &&
      value.back() == value.front()) {
    value = value.substr(1, value.size() - 2);
  }
  if (key == "tau") cfg.scheme.tau = parse_double(key, value);
  else if (key == "rho") cfg.scheme.rho = parse_double(key, value);
  else if (key == "inner_tol") cfg.scheme.inner_tol = parse_double(key, value);
  else if (key == "inner_max_iters") cfg.scheme.inner_max_iters = static_cast<int>(parse_int(key, value));
  else if (key == "gs_tol") cfg.scheme.gs_tol = parse_double(key, value);
  else if (key == "gs_max_iters") cfg.scheme.gs_max_iters = static_cast<int>(parse_int(key, value));
  else if (key == "boundary") cfg.scheme.boundary = boundary_from_string(value);
  else if (key == "warm_start") cfg.scheme.warm_start = parse_bool(key, value);
  else if (key == "grid") std::tie(cfg.nx, cfg.ny) = parse_grid(value);
  else if (key == "t_end") cfg.t_end = parse_double(key, value);
  else if (key == "taus") cfg.taus = parse_list(value);
  else if (key == "snapshots") cfg.snapshots = parse_list(value);
  else if (key == "out") cfg.out_dir = value;
  else if (key == "oracle_dt") cfg.oracle_dt = parse_double(key, value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
  else if (key == "manifold") cfg.manifold = manifold_from_string(value);
  else if (key == "initial") cfg.initial = value;
  else if (key == "experiment") cfg.experiment = experiment_from_string(value);
  else throw PreconditionError("unknown config key '" + key + "'");
}

void apply_config_file(ExperimentConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw PreconditionError(path.string() + ":" + std::to_string(lineno) + ": expected key = value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

fs::path resolve_out_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return cfg.out_dir;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = std::string(to_string(cfg.experiment));
  j["grid"] = cfg.ny == 0 ? json{cfg.nx} : json{cfg.nx, cfg.ny};
  j["tau"] = cfg.scheme.tau;
  j["rho"] = cfg.scheme.rho;
  j["inner_tol"] = cfg.scheme.inner_tol;
  j["inner_max_iters"] = cfg.scheme.inner_max_iters;
  j["gs_tol"] = cfg.scheme.gs_tol;
  j["gs_max_iters"] = cfg.scheme.gs_max_iters;
  j["boundary"] = std::string(to_string(cfg.scheme.boundary));
  j["warm_start"] = cfg.scheme.warm_start;
  j["t_end"] = cfg.t_end;
  j["taus"] = cfg.taus;
  j["snapshots"] = cfg.snapshots;
  j["out"] = resolve_out_dir(cfg).string();
  j["oracle_dt"] = cfg.oracle_dt;
  j["seed"] = cfg.seed;
  if (cfg.experiment == Experiment::Custom) {
    j["manifold"] = std::string(to_string(cfg.manifold));
    j["initial"] = cfg.initial.string();
  }
  return j;
}

GridPtr make_grid(const ExperimentConfig& cfg) {
  return cfg.ny == 0 ? build_uniform_1d(cfg.nx, 1.0) : build_uniform_2d(cfg.nx, cfg.ny, 1.0, 1.0);
}

namespace {

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

json metadata() {
  return {{"version", TVFLOW_VERSION},
          {"h1_norm", "Z0 (edge values) carries the edge norm, Z1 (cell values) the cell norm"},
          {"sign_convention", "Sign = +1 on the lower cell index"}};
}

json constants_json(const ManifoldConstants& mc, double lip, double v_min) {
  json j{{"curv", mc.curv},
         {"diam", mc.diam},
         {"c_m_upper", mc.c_m_upper},
         {"source", mc.source == ConstantsSource::Analytic ? "analytic" : "empirical"},
         {"lip_tv_upper", lip},
         {"v_min", v_min}};
  j["lfs"] = mc.lfs ? json(*mc.lfs) : json(nullptr);
  return j;
}

double max_x_ratio(const Trajectory& traj, double lip) {
  double worst = 0.0;
  for (const StepRecord& r : traj.records) worst = std::max(worst, r.x_norm / (r.tau * lip));
  return worst;
}

void write_energy_csv(const fs::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "step,t,tv,inner_iterations,rel_error,x_norm\n";
  out << 0 << ',' << format_double(traj.times[0]) << ',' << format_double(discrete_tv(traj.states[0]))
      << ",0,0,0\n";
  for (const StepRecord& r : traj.records) {
    out << r.step << ',' << format_double(traj.times[r.step]) << ',' << format_double(r.energy)
        << ',' << r.inner_iterations << ',' << format_double(r.rel_error) << ','
        << format_double(r.x_norm) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

std::vector<double> theta_column(const Field& u) {
  std::vector<double> th(u.size());
  for (std::size_t a = 0; a < u.size(); ++a) {
    th[a] = raw::s2_euler_angles(u.at(a)).theta;
  }
  return th;
}

std::vector<double> axis_angle_columns(const Field& u) {
  std::vector<double> out;
  out.reserve(3 * u.size());
  for (std::size_t a = 0; a < u.size(); ++a) {
    const auto r = ManifoldPoint::make(ManifoldKind::RotationSO3, {u.at(a).begin(), u.at(a).end()});
    const AxisAngle aa = so3_axis_angle(r);
    const EulerAngles e =
        s2_euler_angles(ManifoldPoint::make(ManifoldKind::SphereS2, {aa.axis.begin(), aa.axis.end()}));
    out.push_back(aa.theta);
    out.push_back(e.theta);
    out.push_back(e.phi);
  }
  return out;
}

json flags_json(const DissipationReport& d) {
  return {{"dissipation_hypothesis", d.hypothesis_holds},
          {"energy_monotone", d.monotone},
          {"max_energy_increase", d.max_increase}};
}

// Interior edges of the benchmark intervals (0,l1), (l1,l2), (l2,L).
std::vector<std::size_t> benchmark_interior_edges(const Grid& g, const BenchmarkSpec& spec) {
  const auto interval = [&](std::size_t cell) {
    const double x = g.partition.cell(cell).center()[0];
    return x < spec.l1 ? 0 : (x < spec.l2 ? 1 : 2);
  };
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    if (interval(g.edges.edge(e).lo) == interval(g.edges.edge(e).hi)) out.push_back(e);
  }
  return out;
}

}  // namespace

S2BenchmarkReport run_s2_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = resolve_out_dir(cfg);
  fs::create_directories(dir);
  const GridPtr grid = make_grid(cfg);
  const BenchmarkSpec spec = default_benchmark();
  const Field u0 = build_s2_benchmark_initial(grid);

  S2BenchmarkReport rep;
  rep.trajectory = run_flow(ManifoldKind::SphereS2, u0, cfg.t_end, cfg.scheme);
  const Trajectory& traj = rep.trajectory;
  if (max_point_defect(ManifoldKind::SphereS2, traj.states.back()) > 1e-10) {
    throw std::runtime_error("solver left the sphere");
  }
  rep.lip = lip_tv_upper(*grid);
  const ManifoldConstants mc = manifold_constants(ManifoldKind::SphereS2);
  rep.dissipation = check_dissipation(traj, mc.curv, rep.lip);
  rep.max_x_ratio = max_x_ratio(traj, rep.lip);

  const auto a = spec.a();
  const auto b = spec.b();
  const auto interior = benchmark_interior_edges(*grid, spec);
  for (const Field& u : traj.states) {
    for (std::size_t c = 0; c < u.size(); ++c) {
      const double x = grid->partition.cell(c).center()[0];
      if (x >= spec.l1 && x < spec.l2) continue;
      const auto& ref = x < spec.l1 ? a : b;
      for (std::size_t k = 0; k < 3; ++k) {
        rep.outer_facet_deviation = std::max(rep.outer_facet_deviation, std::abs(u.at(c)[k] - ref[k]));
      }
    }
    const auto f = facet(u, kFacetTol);
    if (!std::includes(f.begin(), f.end(), interior.begin(), interior.end())) {
      rep.facets_preserved = false;
    }
  }

  rep.snapshot_times = cfg.snapshots;
  const auto hs = ode_h_sample(spec, cfg.snapshots, cfg.oracle_dt);
  json errors = json::array();
  for (std::size_t i = 0; i < cfg.snapshots.size(); ++i) {
    const double t = cfg.snapshots[i];
    const Field u = rothe_interpolate(traj, t);
    const Field ex = facet_field(spec, grid, hs[i]);
    const double err = l2_error(u, ex);
    rep.snapshot_errors.push_back(err);
    errors.push_back({{"t", t}, {"error", err}});
    const std::string tag = time_tag(t);
    const fs::path ps = dir / ("theta_solver_t" + tag + ".csv");
    const fs::path po = dir / ("theta_oracle_t" + tag + ".csv");
    const fs::path pf = dir / ("field_solver_t" + tag + ".csv");
    const fs::path pe = dir / ("field_oracle_t" + tag + ".csv");
    write_cell_table(ps, *grid, {"theta"}, theta_column(u));
    write_cell_table(po, *grid, {"theta"}, theta_column(ex));
    write_field_csv(pf, u, ManifoldKind::SphereS2);
    write_field_csv(pe, ex, ManifoldKind::SphereS2);
    rep.files.insert(rep.files.end(), {ps, po, pf, pe});
  }
  const fs::path energy_path = dir / "energy.csv";
  write_energy_csv(energy_path, traj);
  rep.files.push_back(energy_path);

  json flags = flags_json(rep.dissipation);
  flags["outer_facet_deviation"] = rep.outer_facet_deviation;
  flags["facets_preserved"] = rep.facets_preserved;
  flags["max_x_over_tau_lip"] = rep.max_x_ratio;
  flags["manifold_invariant"] = true;
  rep.json = {{"config", config_to_json(cfg)},
              {"constants", constants_json(mc, rep.lip, grid->partition.min_cell_measure())},
              {"energy", energy_series(traj)},
              {"errors", errors},
              {"slope", nullptr},
              {"flags", flags},
              {"metadata", metadata()}};
  const fs::path report = dir / "report.json";
  write_json(report, rep.json);
  rep.files.push_back(report);
  return rep;
}

ConvergenceReport run_convergence_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = resolve_out_dir(cfg);
  fs::create_directories(dir);
  const GridPtr grid = make_grid(cfg);
  const BenchmarkSpec spec = default_benchmark();
  const Field u0 = build_s2_benchmark_initial(grid);
  const Field exact = exact_flow(spec, grid, cfg.t_end, cfg.oracle_dt);
  const ManifoldConstants mc = manifold_constants(ManifoldKind::SphereS2);

  ConvergenceReport rep;
  rep.lip = lip_tv_upper(*grid);
  rep.constants = error_constants(mc, rep.lip, grid->partition.min_cell_measure(),
                                  grid->partition.domain_measure());
  rep.cases.resize(cfg.taus.size());
  std::vector<fs::path> case_files(cfg.taus.size());
  std::vector<std::exception_ptr> failures(cfg.taus.size());

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < cfg.taus.size(); ++i) {
    try {
      SchemeConfig sc = cfg.scheme;
      sc.tau = cfg.taus[i];
      const Trajectory traj = run_flow(ManifoldKind::SphereS2, u0, cfg.t_end, sc);
      if (max_point_defect(ManifoldKind::SphereS2, traj.states.back()) > 1e-10) {
        throw std::runtime_error("solver left the sphere");
      }
      ConvergenceCase& c = rep.cases[i];
      c.tau = sc.tau;
      c.error = l2_error(traj.states.back(), exact);
      c.steps = traj.steps();
      for (const StepRecord& r : traj.records) {
        c.max_inner_iterations = std::max(c.max_inner_iterations, r.inner_iterations);
      }
      c.max_x_ratio = max_x_ratio(traj, rep.lip);
      c.dissipation = check_dissipation(traj, mc.curv, rep.lip);
      c.log_error_sq = 2.0 * std::log(c.error);
      c.log_bound = log_error_bound(cfg.t_end, sc.tau, 0.0, rep.constants);
      case_files[i] = dir / ("field_tau" + time_tag(sc.tau) + ".csv");
      write_field_csv(case_files[i], traj.states.back(), ManifoldKind::SphereS2);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  rep.files = case_files;

  std::vector<double> taus, errs;
  for (const auto& c : rep.cases) {
    taus.push_back(c.tau);
    errs.push_back(c.error);
  }
  if (rep.cases.size() >= 2) rep.fit = fit_convergence_order(taus, errs);

  const fs::path table = dir / "convergence.csv";
  {
    std::ofstream out(table);
    if (!out) throw std::runtime_error("cannot open " + table.string() + " for writing");
    out << "tau,error,steps,max_inner_iterations,max_x_over_tau_lip,log_error_sq,log_bound\n";
    for (const auto& c : rep.cases) {
      out << format_double(c.tau) << ',' << format_double(c.error) << ',' << c.steps << ','
          << c.max_inner_iterations << ',' << format_double(c.max_x_ratio) << ','
          << format_double(c.log_error_sq) << ',' << format_double(c.log_bound) << '\n';
    }
  }
  rep.files.push_back(table);

  json errors = json::array();
  json energy_flags = json::array();
  bool bound_holds = true;
  for (const auto& c : rep.cases) {
    errors.push_back({{"tau", c.tau}, {"t", cfg.t_end}, {"error", c.error}});
    energy_flags.push_back(flags_json(c.dissipation));
    bound_holds = bound_holds && c.log_error_sq < c.log_bound;
  }
  json constants = constants_json(mc, rep.lip, grid->partition.min_cell_measure());
  constants["c0"] = rep.constants.c0;
  constants["c1"] = rep.constants.c1;
  constants["c2"] = rep.constants.c2;
  json slope = rep.fit ? json(rep.fit->slope) : json(nullptr);
  json flags{{"error_bound_holds", bound_holds}, {"cases", energy_flags}};
  if (rep.fit) flags["r2"] = rep.fit->r2;
  rep.json = {{"config", config_to_json(cfg)},
              {"constants", constants},
              {"energy", json::array()},
              {"errors", errors},
              {"slope", slope},
              {"flags", flags},
              {"metadata", metadata()}};
  const fs::path report = dir / "report.json";
  write_json(report, rep.json);
  rep.files.push_back(report);
  return rep;
}

So3Report run_so3(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = resolve_out_dir(cfg);
  fs::create_directories(dir);
  const GridPtr grid = make_grid(cfg);
  const Field u0 = build_so3_initial(grid);

  So3Report rep;
  rep.trajectory = run_flow(ManifoldKind::RotationSO3, u0, cfg.t_end, cfg.scheme);
  const Trajectory& traj = rep.trajectory;
  if (max_point_defect(ManifoldKind::RotationSO3, traj.states.back()) > 1e-10) {
    throw std::runtime_error("solver left SO(3)");
  }
  rep.lip = lip_tv_upper(*grid);
  const ManifoldConstants mc = manifold_constants(ManifoldKind::RotationSO3);
  rep.dissipation = check_dissipation(traj, mc.curv, rep.lip);
  rep.max_x_ratio = max_x_ratio(traj, rep.lip);

  rep.snapshot_times = cfg.snapshots;
  json snaps = json::array();
  for (double t : cfg.snapshots) {
    const Field u = rothe_interpolate(traj, t);
    rep.snapshot_energy.push_back(discrete_tv(u));
    rep.facet_counts.push_back(facet(u, kFacetTol).size());
    const fs::path p = dir / ("axis_angle_t" + time_tag(t) + ".csv");
    write_cell_table(p, *grid, {"theta", "phi", "psi"}, axis_angle_columns(u));
    rep.files.push_back(p);
    snaps.push_back({{"t", t}, {"tv", rep.snapshot_energy.back()},
                     {"facet_edges", rep.facet_counts.back()}});
  }
  const fs::path energy_path = dir / "energy.csv";
  write_energy_csv(energy_path, traj);
  rep.files.push_back(energy_path);

  json flags = flags_json(rep.dissipation);
  flags["max_x_over_tau_lip"] = rep.max_x_ratio;
  flags["facet_counts_nondecreasing"] =
      std::is_sorted(rep.facet_counts.begin(), rep.facet_counts.end());
  flags["snapshots"] = snaps;
  flags["manifold_invariant"] = true;
  rep.json = {{"config", config_to_json(cfg)},
              {"constants", constants_json(mc, rep.lip, grid->partition.min_cell_measure())},
              {"energy", energy_series(traj)},
              {"errors", json::array()},
              {"slope", nullptr},
              {"flags", flags},
              {"metadata", metadata()}};
  const fs::path report = dir / "report.json";
  write_json(report, rep.json);
  rep.files.push_back(report);
  return rep;
}

CustomReport run_custom(const ExperimentConfig& cfg) {
  cfg.validate();
  const fs::path dir = resolve_out_dir(cfg);
  fs::create_directories(dir);
  const GridPtr grid = make_grid(cfg);
  const Field u0 = read_field_csv(cfg.initial, grid, cfg.manifold);

  CustomReport rep;
  rep.trajectory = run_flow(cfg.manifold, u0, cfg.t_end, cfg.scheme);
  const Trajectory& traj = rep.trajectory;
  if (max_point_defect(cfg.manifold, traj.states.back()) > 1e-10) {
    throw std::runtime_error("solver left the manifold");
  }
  const double lip = lip_tv_upper(*grid);
  const ManifoldConstants mc = manifold_constants(cfg.manifold);
  rep.dissipation = check_dissipation(traj, mc.curv, lip);

  for (double t : cfg.snapshots) {
    const fs::path p = dir / ("field_t" + time_tag(t) + ".csv");
    write_field_csv(p, rothe_interpolate(traj, t), cfg.manifold);
    rep.files.push_back(p);
  }
  const fs::path final_path = dir / "field_final.csv";
  write_field_csv(final_path, traj.states.back(), cfg.manifold);
  const fs::path energy_path = dir / "energy.csv";
  write_energy_csv(energy_path, traj);
  rep.files.insert(rep.files.end(), {final_path, energy_path});

  json flags = flags_json(rep.dissipation);
  flags["max_x_over_tau_lip"] = max_x_ratio(traj, lip);
  flags["manifold_invariant"] = true;
  rep.json = {{"config", config_to_json(cfg)},
              {"constants", constants_json(mc, lip, grid->partition.min_cell_measure())},
              {"energy", energy_series(traj)},
              {"errors", json::array()},
              {"slope", nullptr},
              {"flags", flags},
              {"metadata", metadata()}};
  const fs::path report = dir / "report.json";
  write_json(report, rep.json);
  rep.files.push_back(report);
  return rep;
}

}  // namespace tvflow
