// Parallel kernels against their serial references, plus one full step.

#include <benchmark/benchmark.h>

#include <random>

#include "tvflow/kernels.hpp"
#include "tvflow/oracle.hpp"
#include "tvflow/solver.hpp"

using namespace tvflow;

namespace {

struct Data {
  GridPtr grid;
  std::size_t dim;
  std::vector<double> u, v, z, cell_out, edge_out;
};

Data make_data(std::size_t side, ManifoldKind kind) {
  Data d{build_uniform_2d(side, side, 1.0, 1.0), ambient_dim(kind), {}, {}, {}, {}, {}};
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  for (std::size_t a = 0; a < d.grid->partition.size(); ++a) {
    const auto p = random_point(kind, rng);
    d.u.insert(d.u.end(), p.coords().begin(), p.coords().end());
  }
  d.v.resize(d.u.size());
  for (double& x : d.v) x = n(rng);
  d.z.resize(d.grid->edges.size() * d.dim);
  for (double& x : d.z) x = n(rng);
  d.cell_out.resize(d.u.size());
  d.edge_out.resize(d.z.size());
  return d;
}

template <bool Parallel>
void BM_Gradient(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::gradient(*d.grid, d.dim, d.u, d.edge_out);
    else kernels::serial::gradient(*d.grid, d.dim, d.u, d.edge_out);
    benchmark::DoNotOptimize(d.edge_out.data());
  }
}

template <bool Parallel>
void BM_Adjoint(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::adjoint(*d.grid, d.dim, d.z, d.cell_out);
    else kernels::serial::adjoint(*d.grid, d.dim, d.z, d.cell_out);
    benchmark::DoNotOptimize(d.cell_out.data());
  }
}

template <bool Parallel>
void BM_Shrink(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::shrink_edges(d.dim, d.z, 0.5, d.edge_out);
    else kernels::serial::shrink_edges(d.dim, d.z, 0.5, d.edge_out);
    benchmark::DoNotOptimize(d.edge_out.data());
  }
}

template <bool Parallel>
void BM_ProjectCells(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::project_cells(ManifoldKind::RotationSO3, d.u, d.v, {}, d.cell_out);
    else kernels::serial::project_cells(ManifoldKind::RotationSO3, d.u, d.v, {}, d.cell_out);
    benchmark::DoNotOptimize(d.cell_out.data());
  }
}

template <bool Parallel>
void BM_ExpCells(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  kernels::serial::project_cells(ManifoldKind::RotationSO3, d.u, d.v, {}, d.cell_out);
  for (std::size_t i = 0; i < d.v.size(); ++i) d.v[i] = 0.1 * d.cell_out[i];
  for (auto _ : state) {
    if constexpr (Parallel) kernels::exp_cells(ManifoldKind::RotationSO3, d.u, d.v, d.cell_out);
    else kernels::serial::exp_cells(ManifoldKind::RotationSO3, d.u, d.v, d.cell_out);
    benchmark::DoNotOptimize(d.cell_out.data());
  }
}

template <bool Parallel>
void BM_TotalVariation(benchmark::State& state) {
  auto d = make_data(static_cast<std::size_t>(state.range(0)), ManifoldKind::RotationSO3);
  for (auto _ : state) {
    double tv = Parallel ? kernels::total_variation(*d.grid, d.dim, d.u)
                         : kernels::serial::total_variation(*d.grid, d.dim, d.u);
    benchmark::DoNotOptimize(tv);
  }
}

void BM_So3Step(benchmark::State& state) {
  const auto g = build_uniform_2d(25, 25, 1.0, 1.0);
  const auto u0 = build_so3_initial(g);
  SchemeConfig cfg;
  cfg.tau = 1e-3;
  for (auto _ : state) {
    auto s = mm_step(ManifoldKind::RotationSO3, u0, cfg);
    benchmark::DoNotOptimize(s.u_next.values().data());
  }
}

void BM_S2Step(benchmark::State& state) {
  const auto g = build_uniform_1d(100, 1.0);
  const auto u0 = build_s2_benchmark_initial(g);
  SchemeConfig cfg;
  cfg.boundary = Boundary::Dirichlet;
  for (auto _ : state) {
    auto s = mm_step(ManifoldKind::SphereS2, u0, cfg);
    benchmark::DoNotOptimize(s.u_next.values().data());
  }
}

}  // namespace

BENCHMARK(BM_Gradient<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_Gradient<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_Adjoint<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_Adjoint<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_Shrink<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_Shrink<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_ProjectCells<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_ProjectCells<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_ExpCells<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_ExpCells<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_TotalVariation<true>)->Arg(25)->Arg(200);
BENCHMARK(BM_TotalVariation<false>)->Arg(25)->Arg(200);
BENCHMARK(BM_S2Step)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_So3Step)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
