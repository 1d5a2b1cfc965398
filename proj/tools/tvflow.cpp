// Command line driver for the experiments.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tvflow/experiments.hpp"

namespace {

struct Flags {
  std::string config;
  std::string tau;
  std::string rho;
  std::string grid;
  std::string t_end;
  std::string out;
  std::string snapshots;
  std::string boundary;
  std::string oracle_dt;
  std::string seed;
  std::string manifold;
  std::string initial;
};

void add_flags(CLI::App* sub, Flags& f, bool tau_list) {
  sub->add_option("--config", f.config, "flat key = value config file");
  sub->add_option("--tau", f.tau, tau_list ? "comma separated step sizes" : "time step");
  sub->add_option("--rho", f.rho, "Bregman penalty");
  sub->add_option("--grid", f.grid, "cells: N (1-D) or NxM (2-D)");
  sub->add_option("--t-end", f.t_end, "final time");
  sub->add_option("--out", f.out, "output directory (TVFLOW_OUT_DIR overrides)");
  sub->add_option("--snapshots", f.snapshots, "comma separated snapshot times");
  sub->add_option("--boundary", f.boundary, "neumann or dirichlet")
      ->check(CLI::IsMember({"neumann", "dirichlet"}));
  sub->add_option("--oracle-dt", f.oracle_dt, "explicit Euler step of the ODE oracle");
  sub->add_option("--seed", f.seed, "seed for randomized parts");
}

tvflow::ExperimentConfig resolve(tvflow::Experiment e, const Flags& f) {
  auto cfg = tvflow::default_config(e);
  if (!f.config.empty()) tvflow::apply_config_file(cfg, f.config);
  cfg.experiment = e;
  const auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) tvflow::apply_setting(cfg, key, v);
  };
  set(e == tvflow::Experiment::ConvergenceStudy ? "taus" : "tau", f.tau);
  set("rho", f.rho);
  set("grid", f.grid);
  set("t_end", f.t_end);
  set("out", f.out);
  set("snapshots", f.snapshots);
  set("boundary", f.boundary);
  set("oracle_dt", f.oracle_dt);
  set("seed", f.seed);
  set("manifold", f.manifold);
  set("initial", f.initial);
  cfg.validate();
  return cfg;
}

void print_files(const std::vector<std::filesystem::path>& files) {
  for (const auto& p : files) std::cout << "wrote " << p.string() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Manifold-valued total variation flow experiments"};
  app.require_subcommand(1);

  Flags s2f, cvf, so3f, cuf;
  auto* s2 = app.add_subcommand("s2-benchmark", "S^2 three-facet benchmark against the ODE oracle");
  add_flags(s2, s2f, false);
  auto* cv = app.add_subcommand("convergence", "error at t_end against the oracle for several tau");
  add_flags(cv, cvf, true);
  auto* so3 = app.add_subcommand("so3", "SO(3)-valued flow on the unit square");
  add_flags(so3, so3f, false);
  auto* cu = app.add_subcommand("custom", "flow from a field CSV");
  add_flags(cu, cuf, false);
  cu->add_option("--manifold", cuf.manifold, "s2 or so3");
  cu->add_option("--initial", cuf.initial, "initial field CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (s2->parsed()) {
      const auto rep = tvflow::run_s2_benchmark(resolve(tvflow::Experiment::S2Benchmark, s2f));
      print_files(rep.files);
      for (std::size_t i = 0; i < rep.snapshot_times.size(); ++i) {
        std::printf("t=%-6g error=%.6e\n", rep.snapshot_times[i], rep.snapshot_errors[i]);
      }
    } else if (cv->parsed()) {
      const auto rep = tvflow::run_convergence_study(resolve(tvflow::Experiment::ConvergenceStudy, cvf));
      print_files(rep.files);
      for (const auto& c : rep.cases) std::printf("tau=%-8g error=%.6e\n", c.tau, c.error);
      if (rep.fit) {
        std::printf("slope=%.4f r2=%.4f\n", rep.fit->slope, rep.fit->r2);
      } else {
        std::printf("slope=n/a\n");
      }
    } else if (so3->parsed()) {
      const auto rep = tvflow::run_so3(resolve(tvflow::Experiment::So3, so3f));
      print_files(rep.files);
      for (std::size_t i = 0; i < rep.snapshot_times.size(); ++i) {
        std::printf("t=%-6g tv=%.6e facet_edges=%zu\n", rep.snapshot_times[i],
                    rep.snapshot_energy[i], rep.facet_counts[i]);
      }
    } else if (cu->parsed()) {
      const auto rep = tvflow::run_custom(resolve(tvflow::Experiment::Custom, cuf));
      print_files(rep.files);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
