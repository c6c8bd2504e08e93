// Serial reference versus OpenMP path for the data-parallel kernels.
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "lmgd/analysis.hpp"

namespace {

using lmgd::Execution;

Execution mode(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_StationaritySamples(benchmark::State& state) {
  const lmgd::ModelParams p{0.0, 6.0, 10.0};
  std::vector<double> z(static_cast<std::size_t>(state.range(1)));
  std::vector<double> g(z.size());
  lmgd::midpoint_samples(-1.0, 1.0, z);
  for (auto _ : state) {
    lmgd::stationarity_samples(p, 1.0, z, g, mode(state));
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(BM_StationaritySamples)->ArgsProduct({{0, 1}, {100000, 1000000}})->ArgNames({"parallel", "n"});

void BM_EnergyGrid(benchmark::State& state) {
  const lmgd::ModelParams p{0.0, 6.0, 0.5};
  const auto n = static_cast<std::size_t>(state.range(1));
  std::vector<double> phi(n), z(n), out(n * n);
  std::vector<unsigned char> mask(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
    z[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  for (auto _ : state) {
    lmgd::energy_grid(p, phi, z, out, mask, mode(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(n * n));
}
BENCHMARK(BM_EnergyGrid)->ArgsProduct({{0, 1}, {401, 1001}})->ArgNames({"parallel", "n"});

void BM_BranchSweep(benchmark::State& state) {
  const lmgd::ScanOptions opts{20000, mode(state)};
  for (auto _ : state) {
    auto t = lmgd::branch_sweep({0.0, 6.0, 0.0}, lmgd::SweepAxis::k, 0.01, 20.0,
                                static_cast<std::size_t>(state.range(1)), opts);
    benchmark::DoNotOptimize(t.rows.data());
  }
}
BENCHMARK(BM_BranchSweep)->ArgsProduct({{0, 1}, {200}})->ArgNames({"parallel", "steps"})->Unit(benchmark::kMillisecond);

void BM_TransitionScan(benchmark::State& state) {
  const std::vector<double> lambdas{2.0, 4.0, 6.0, 8.0, 10.0};
  std::vector<double> ks(40);
  for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = 0.5 * static_cast<double>(i + 1);
  const lmgd::ScanOptions opts{20000, mode(state)};
  for (auto _ : state) {
    auto t = lmgd::transition_scan(lambdas, ks, 0.0, opts);
    benchmark::DoNotOptimize(t.rows.data());
  }
}
BENCHMARK(BM_TransitionScan)->ArgsProduct({{0, 1}})->ArgNames({"parallel"})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
