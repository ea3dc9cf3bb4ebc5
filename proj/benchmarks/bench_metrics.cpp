#include <benchmark/benchmark.h>

#include "qmeval/cci.hpp"
#include "qmeval/correlation.hpp"
#include "qmeval/experiments.hpp"
#include "qmeval/simulation.hpp"

namespace {

void BM_ktau(benchmark::State& state) {
  const auto eval = qmeval::simulate_correlated_pairs(static_cast<std::size_t>(state.range(0)), 0.8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qmeval::ktau(eval.mos(), eval.predictions()).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ktau)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oNLogN);

void BM_cci(benchmark::State& state) {
  const auto eval = qmeval::simulate_correlated_pairs(static_cast<std::size_t>(state.range(0)), 0.8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(qmeval::cci(eval).value);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_cci)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_sample_size_point(benchmark::State& state) {
  const auto eval = qmeval::simulate_correlated_pairs(1000, 0.8, 1);
  auto config = qmeval::default_config(qmeval::ExperimentKind::sample_size);
  config.grid = {static_cast<std::size_t>(state.range(0))};
  config.replicates = 100;
  for (auto _ : state) benchmark::DoNotOptimize(qmeval::run_sample_size_experiment(eval, config, {1}).points.size());
}
BENCHMARK(BM_sample_size_point)->Arg(10)->Arg(100)->Arg(998)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
