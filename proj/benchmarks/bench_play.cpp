#include <benchmark/benchmark.h>

#include "mg/oracle.hpp"
#include "mg/scenarios.hpp"
#include "mg/strategy.hpp"

namespace {

mg::MetricInstance sample_instance(int chains) {
  return mg::gen_random_instance({.chains = chains, .max_states = 4, .metric = mg::MetricKind::random}, 17);
}

void BM_OracleSolve(benchmark::State& state) {
  const auto m = sample_instance(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mg::solve_optimal(m, 1));
  state.counters["states"] = static_cast<double>(mg::oracle_state_count(m));
}
BENCHMARK(BM_OracleSolve)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_IndexTrial(benchmark::State& state) {
  const mg::GameModel model(sample_instance(static_cast<int>(state.range(0))));
  mg::RandomSource rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(mg::run_index_strategy(model, rng));
}
BENCHMARK(BM_IndexTrial)->Arg(4)->Arg(32);

void BM_DoublingMetricTrial(benchmark::State& state) {
  const mg::GameModel model(sample_instance(static_cast<int>(state.range(0))));
  const mg::GreedyEffectiveCostOrdering solver;
  mg::RandomSource rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(mg::run_doubling_metric(model, {}, 1.0, solver, rng));
}
BENCHMARK(BM_DoublingMetricTrial)->Arg(4)->Arg(32);

void BM_CounterexampleIndexTrial(benchmark::State& state) {
  const mg::GameModel model(mg::dtw_counterexample({}));
  mg::RandomSource rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(mg::run_index_strategy(model, rng));
}
BENCHMARK(BM_CounterexampleIndexTrial);

}  // namespace
