// Serial reference vs OpenMP kernels: Monte Carlo paths and shot sweeps.

#include "merton/hjb_solver.hpp"
#include "merton/montecarlo.hpp"
#include "merton/policy.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace merton;

namespace {

const ModelParams& reference() {
  static const ModelParams p = validate_params({1.0, 1.0, 0.5, 0.5, 2.0, 1.0 / 3.0});
  return p;
}

const Policy& policy() {
  static const Policy pol(reference(), find_free_boundary(reference()));
  return pol;
}

SimConfig paths(long n) {
  SimConfig cfg;
  cfg.x0 = 3.0;
  cfg.n_paths = n;
  return cfg;
}

std::vector<double> candidates(std::size_t n) {
  std::vector<double> z(n);
  for (std::size_t i = 0; i < n; ++i)
    z[i] = 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(n - 1);
  return z;
}

void BM_EstimateSerial(benchmark::State& state) {
  const SimConfig cfg = paths(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_value_serial(policy(), cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EstimateParallel(benchmark::State& state) {
  const SimConfig cfg = paths(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_value(policy(), cfg).mean);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepSerial(benchmark::State& state) {
  const auto z = candidates(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(sweep_shots_serial(reference(), z).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto z = candidates(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(sweep_shots(reference(), z).size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

} // namespace

BENCHMARK(BM_EstimateSerial)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EstimateParallel)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
