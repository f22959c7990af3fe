#include <benchmark/benchmark.h>

#include "mg/grade.hpp"
#include "mg/order_statistics.hpp"
#include "mg/scenarios.hpp"
#include "mg/selection_cost.hpp"

namespace {

mg::MarkovSystem sample_system(int states) {
  mg::RandomSource rng(static_cast<std::uint64_t>(states));
  mg::MarkovSystem s = mg::gen_random_system(states, 0.0, 1.0, rng);
  while (s.size() < states) s = mg::gen_random_system(states, 0.0, 1.0, rng);
  return s;
}

void BM_StoppingValue(benchmark::State& state) {
  const auto s = sample_system(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mg::stopping_value(s, 0.5));
}
BENCHMARK(BM_StoppingValue)->Arg(4)->Arg(16)->Arg(64);

void BM_GradeTable(benchmark::State& state) {
  const auto s = sample_system(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(mg::compute_grade_table(s, 1.0));
}
BENCHMARK(BM_GradeTable)->Arg(4)->Arg(16)->Arg(64);

void BM_SelectionCostPmf(benchmark::State& state) {
  const auto s = sample_system(static_cast<int>(state.range(0)));
  const auto grades = mg::compute_grades(s);
  for (auto _ : state) benchmark::DoNotOptimize(mg::selection_cost_pmf(s, grades, s.start));
}
BENCHMARK(BM_SelectionCostPmf)->Arg(4)->Arg(16)->Arg(64);

void BM_OrderStatisticCdf(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<mg::SelectionCostPMF> pmfs;
  for (int i = 0; i < n; ++i) pmfs.push_back(mg::selection_cost_pmf(sample_system(4 + i % 5)));
  for (auto _ : state) benchmark::DoNotOptimize(mg::order_statistic_cdf(pmfs, (n + 1) / 2, 0.5));
}
BENCHMARK(BM_OrderStatisticCdf)->Arg(8)->Arg(64)->Arg(512);

}  // namespace
