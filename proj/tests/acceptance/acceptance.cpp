// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails. All tolerances and budgets are fixed here.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "mg/experiment.hpp"
#include "mg/grade.hpp"
#include "mg/instance_io.hpp"
#include "mg/oracle.hpp"
#include "mg/order_statistics.hpp"
#include "mg/scenarios.hpp"
#include "mg/selection_cost.hpp"
#include "mg/strategy.hpp"
#include "reference.hpp"

using namespace mg;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// -----------------------------------------------------------------------------
// 1. Closed-form grades
// -----------------------------------------------------------------------------

constexpr double kGradeTol = 1e-8;

Verdict closed_form_grades() {
  double worst = 0.0;
  for (double a : {0.13, 0.5, 2.0}) {
    const auto chain = delta_chain(a);
    worst = std::max(worst, std::abs(compute_grade(chain, 0) - a));
    for (double w : {0.01, 1.0})
      worst = std::max(worst, std::abs(compute_grade_table(chain, w).dummy_grade[0] - (a + w)));
  }
  const std::vector<std::pair<double, double>> grid{{0.8, 0.01}, {0.4, 0.01}, {0.5, 0.05}, {0.2, 0.3}, {0.9, 0.1}};
  for (const auto& [x, c] : grid) worst = std::max(worst, std::abs(compute_grade(mixture_chain(x, c), 0) - c / (1 - x)));
  return {worst <= kGradeTol, fmt("max error %.2e (tol %.0e)", worst, kGradeTol)};
}

// -----------------------------------------------------------------------------
// 2. Fairness identity
// -----------------------------------------------------------------------------

constexpr int kFairnessInstances = 200;
constexpr int kFairnessStates = 6;
constexpr double kFairnessMeanTol = 1e-8;
constexpr int kTeasingTrials = 100000;
constexpr double kTeasingTvTol = 0.01;

Verdict fairness_identity() {
  RandomSource gen(20240601);
  double worst_mean = 0.0, worst_tv = 0.0;
  for (int i = 0; i < kFairnessInstances; ++i) {
    const auto s = gen_random_system(kFairnessStates, 0.0, 1.0, gen);
    const auto table = compute_grade_table(s, 1.0);
    const auto pmf = selection_cost_pmf(s, table.grade, s.start);
    worst_mean = std::max(worst_mean, std::abs(pmf.mean() - never_quit_cost(s, s.start)));

    std::vector<long long> counts(pmf.support.size(), 0);
    RandomSource rng(77, static_cast<std::uint64_t>(i));
    for (int t = 0; t < kTeasingTrials; ++t) {
      const double y = simulate_teasing(s, table, rng).prevailing_cost;
      const auto it = std::lower_bound(pmf.support.begin(), pmf.support.end(), y - 1e-7);
      if (it == pmf.support.end() || std::abs(*it - y) > 1e-7)
        return {false, fmt("instance %d: prevailing cost %.12g outside the PMF support", i, y)};
      ++counts[static_cast<std::size_t>(it - pmf.support.begin())];
    }
    double tv = 0.0;
    for (std::size_t j = 0; j < counts.size(); ++j)
      tv += std::abs(static_cast<double>(counts[j]) / kTeasingTrials - pmf.mass[j]);
    worst_tv = std::max(worst_tv, tv / 2);
  }
  return {worst_mean <= kFairnessMeanTol && worst_tv <= kTeasingTvTol,
          fmt("%d systems: max |mean - never-quit| %.2e (tol %.0e), max TV %.4f (tol %.2f)", kFairnessInstances,
              worst_mean, kFairnessMeanTol, worst_tv, kTeasingTvTol)};
}

// -----------------------------------------------------------------------------
// 3. Stopping values vs quit-set enumeration
// -----------------------------------------------------------------------------

constexpr int kStoppingSystems = 100;
constexpr double kStoppingTol = 1e-9;

Verdict stopping_equivalence() {
  RandomSource gen(424242);
  double worst = 0.0;
  int checks = 0;
  for (int i = 0; i < kStoppingSystems; ++i) {
    const auto s = gen_random_system(6, 0.0, 1.0, gen);
    std::vector<double> levels{0.0, 0.25, 0.5, 1.0, 2.0, 5.0};
    for (double g : compute_grades(s)) levels.push_back(g);  // ties between playing and quitting
    for (double g : levels) {
      const Eigen::VectorXd pi = stopping_value(s, g).values;
      const Eigen::VectorXd bf = mgtest::brute_force_stopping_values(s, g);
      worst = std::max(worst, (pi - bf).cwiseAbs().maxCoeff());
      ++checks;
    }
  }
  return {worst <= kStoppingTol, fmt("%d (system, level) pairs: max error %.2e (tol %.0e)", checks, worst, kStoppingTol)};
}

// -----------------------------------------------------------------------------
// 4. Banks-Sundaram indifference and witness
// -----------------------------------------------------------------------------

constexpr double kIndifferenceTol = 1e-8;

Verdict banks_sundaram() {
  double worst = 0.0;
  for (const auto& [x, c] : std::vector<std::pair<double, double>>{{0.8, 0.01}, {0.4, 0.01}, {0.5, 0.05}}) {
    const auto at_mu = banks_sundaram_instance(x, c);
    worst = std::max(worst, std::abs(action_value(at_mu, 1, 0, 0) - action_value(at_mu, 1, 0, 1)));
    const auto at_nu = banks_sundaram_instance(x, c, banks_sundaram_nu(x, c));
    worst = std::max(worst, std::abs(action_value(at_nu, 1, 1, 1) - action_value(at_nu, 1, 1, 0)));
  }
  const auto w = banks_sundaram_witness(0.8, 0.4, 0.01);
  const bool witness_ok =
      std::abs(w.active_index - 1.0 / 20) < 1e-12 && std::abs(w.inactive_index - 1.0 / 25) < 1e-12 && w.contradiction;
  return {worst <= kIndifferenceTol && witness_ok,
          fmt("max |play - switch| %.2e (tol %.0e); witness active %.4f > inactive %.4f: %s", worst, kIndifferenceTol,
              w.active_index, w.inactive_index, witness_ok ? "reproduced" : "NOT reproduced")};
}

// -----------------------------------------------------------------------------
// 5. Counterexample separation
// -----------------------------------------------------------------------------

constexpr int kCounterexampleTrials = 10000;
constexpr double kIndexLo = 8.0, kIndexHi = 12.0;
constexpr double kSequentialLo = 1.0, kSequentialHi = 2.1;

double mean_cost(const std::string& strategy, const MetricInstance& m, std::uint64_t seed) {
  ExperimentConfig c;
  c.strategy = strategy;
  c.trials = kCounterexampleTrials;
  c.seed = seed;
  c.grade_cap = 1.0;
  c.run_oracle = false;
  return run_experiment(c, m).summary.mean_total;
}

Verdict counterexample() {
  std::vector<double> ratios;
  double index_mean = 0.0, seq_mean = 0.0;
  for (double eps : {0.2, 0.1, 0.05}) {
    const auto m = dtw_counterexample({eps, 200, 1e6});
    const double a = mean_cost("index", m, 5);
    const double b = mean_cost("sequential", m, 5);
    ratios.push_back(a / b);
    if (eps == 0.1) {
      index_mean = a;
      seq_mean = b;
    }
  }
  const bool monotone = ratios[0] < ratios[1] && ratios[1] < ratios[2];
  const bool pass = index_mean >= kIndexLo && index_mean <= kIndexHi && seq_mean >= kSequentialLo &&
                    seq_mean <= kSequentialHi && monotone;
  return {pass, fmt("eps=0.1: index %.3f in [%g, %g], sequential %.3f in [%g, %g]; ratios %.2f < %.2f < %.2f", index_mean,
                    kIndexLo, kIndexHi, seq_mean, kSequentialLo, kSequentialHi, ratios[0], ratios[1], ratios[2])};
}

// -----------------------------------------------------------------------------
// 6. Budget safety
// -----------------------------------------------------------------------------

constexpr int kBudgetInstances = 100;
constexpr int kBudgetTrialsPerInstance = 100;

Verdict budget_safety() {
  long long unit_trials = 0, metric_trials = 0, violations = 0;
  double unit_use = 0.0, metric_use = 0.0;  // largest fraction of a cap actually spent
  const GreedyEffectiveCostOrdering solver;
  for (int i = 0; i < kBudgetInstances; ++i) {
    const GeneratorParams p{.chains = 2 + i % 4,
                            .max_states = 5,
                            .cost_min = 0.0,
                            .cost_max = 2.0,
                            .metric = i % 2 ? MetricKind::random : MetricKind::unit,
                            .reward_target = 1 + i % 2};
    const GameModel model(gen_random_instance(p, 1000 + static_cast<std::uint64_t>(i)));
    for (int t = 0; t < kBudgetTrialsPerInstance; ++t) {
      RandomSource rng(31, static_cast<std::uint64_t>(i * kBudgetTrialsPerInstance + t));
      const double budget = std::pow(10.0, rng.uniform(-3.0, 0.5));
      const double alpha = 1.0 + static_cast<double>(t % 3);

      GameState unit_state = GameState::initial(model.instance());
      const auto u = run_budget_mg_unit(model, unit_state, p.reward_target, budget, rng);
      ++unit_trials;
      if (u.outcome.movement_cost > kUnitBudgetFactor * budget || u.outcome.switching_cost > kUnitBudgetFactor * budget)
        ++violations;
      unit_use = std::max(unit_use, std::max(u.outcome.movement_cost, u.outcome.switching_cost) /
                                        (kUnitBudgetFactor * budget));

      GameState metric_state = GameState::initial(model.instance());
      const auto r = run_budget_mg_metric(model, metric_state, p.reward_target, budget, alpha, solver, rng,
                                          {.record_trajectory = true});
      ++metric_trials;
      if (r.outcome.switching_cost > kPrefixBudgetFactor * alpha * budget) ++violations;
      metric_use = std::max(metric_use, r.outcome.switching_cost / (kPrefixBudgetFactor * alpha * budget));
      std::map<ChainId, double> per_chain;
      for (const auto& seg : r.outcome.trajectory.segments)
        per_chain[seg.chain] += std::accumulate(seg.step_costs.begin(), seg.step_costs.end(), 0.0);
      for (const auto& [chain, spent] : per_chain)
        if (spent > kChainMovementFactor * alpha * budget) ++violations;
    }
  }
  return {violations == 0,
          fmt("%lld unit + %lld metric trials, %lld violations (allowed 0); peak cap use unit %.2f, metric %.2f",
              unit_trials, metric_trials, violations, unit_use, metric_use)};
}

// -----------------------------------------------------------------------------
// 7. Empirical approximation ratio
// -----------------------------------------------------------------------------

constexpr int kRatioInstances = 50;
constexpr int kRatioTrials = 10000;
constexpr double kRatioBound = 10.0;
constexpr int kRatioRequired = 48;

Verdict approximation_ratio() {
  int within = 0;
  double worst = 0.0;
  for (int i = 0; i < kRatioInstances; ++i) {
    const GeneratorParams p{.chains = 1 + i % 3, .max_states = 4, .cost_min = 0.0, .cost_max = 1.0};
    const auto m = gen_random_instance(p, 5000 + static_cast<std::uint64_t>(i));
    ExperimentConfig c;
    c.strategy = "index";
    c.trials = kRatioTrials;
    c.seed = 8;
    const Report r = run_experiment(c, m);
    if (!r.ratio) return {false, fmt("instance %d: oracle did not run (%s)", i, r.oracle_status.c_str())};
    worst = std::max(worst, *r.ratio);
    within += *r.ratio <= kRatioBound;
  }
  return {within >= kRatioRequired,
          fmt("%d/%d instances with ratio <= %g (need %d); worst ratio %.3f", within, kRatioInstances, kRatioBound,
              kRatioRequired, worst)};
}

// -----------------------------------------------------------------------------
// 8. Order statistics
// -----------------------------------------------------------------------------

constexpr int kOrderSuites = 50;
constexpr int kOrderSamples = 100000;
constexpr double kOrderSigmas = 3.0;
constexpr double kTwinTol = 1e-10;

Verdict order_statistics() {
  const auto mix = selection_cost_pmf(mixture_chain(0.8, 0.01));
  const std::vector<SelectionCostPMF> twins{mix, mix};
  const double twin_err = std::abs(order_statistic_cdf(twins, 1, 0.05) - 0.36);

  RandomSource gen(99);
  double worst_z = 0.0;
  int points = 0, points_within = 0;
  for (int suite = 0; suite < kOrderSuites; ++suite) {
    const int n = 2 + static_cast<int>(gen.below(4));
    const int k = 1 + static_cast<int>(gen.below(static_cast<std::uint64_t>(n)));
    std::vector<MarkovSystem> chains;
    std::vector<GradeTable> tables;
    std::vector<SelectionCostPMF> pmfs;
    std::vector<double> grades;
    for (int i = 0; i < n; ++i) {
      chains.push_back(gen_random_system(5, 0.0, 1.0, gen));
      tables.push_back(compute_grade_table(chains.back(), 1.0));
      pmfs.push_back(selection_cost_pmf(chains.back(), tables.back().grade, chains.back().start));
      grades.insert(grades.end(), tables.back().grade.begin(), tables.back().grade.end());
    }
    const ThresholdSelection sel = select_threshold(pmfs, grades, k);

    // Monte Carlo: K-th smallest of prevailing costs from independent plays.
    std::vector<double> kth(kOrderSamples);
    RandomSource rng(123, static_cast<std::uint64_t>(suite));
    std::vector<double> draw(static_cast<std::size_t>(n));
    for (int t = 0; t < kOrderSamples; ++t) {
      for (int i = 0; i < n; ++i)
        draw[static_cast<std::size_t>(i)] = simulate_teasing(chains[static_cast<std::size_t>(i)],
                                                             tables[static_cast<std::size_t>(i)], rng)
                                                .prevailing_cost;
      std::nth_element(draw.begin(), draw.begin() + (k - 1), draw.end());
      kth[static_cast<std::size_t>(t)] = draw[static_cast<std::size_t>(k - 1)];
    }
    std::sort(kth.begin(), kth.end());
    auto empirical = [&](double x) {
      return static_cast<double>(std::upper_bound(kth.begin(), kth.end(), x + kLevelMergeTol) - kth.begin()) /
             kOrderSamples;
    };
    auto z_at = [&](double x) {
      const double p = order_statistic_cdf(pmfs, k, x);
      const double se = std::sqrt(p * (1 - p) / kOrderSamples);
      const double diff = std::abs(empirical(x) - p);
      return se > 0 ? diff / se : (diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity());
    };
    // The threshold level is the point the metric strategy consumes.
    worst_z = std::max(worst_z, z_at(sel.gamma_j_plus_1));
    for (double x : sel.sorted_grades) {
      ++points;
      points_within += z_at(x) <= kOrderSigmas;
    }
  }
  return {twin_err <= kTwinTol && worst_z <= kOrderSigmas && points_within == points,
          fmt("twin mixtures error %.1e (tol %.0e); threshold-level max |z| %.2f over %d suites (limit %.0f); "
              "all-levels %d/%d within %.0f se",
              twin_err, kTwinTol, worst_z, kOrderSuites, kOrderSigmas, points_within, points, kOrderSigmas)};
}

// -----------------------------------------------------------------------------
// 9. Determinism
// -----------------------------------------------------------------------------

std::string trial_records(const std::string& report) {
  std::istringstream in(report);
  std::string line, out;
  while (std::getline(in, line))
    if (line.find("\"type\":\"trial\"") != std::string::npos) out += line + "\n";
  return out;
}

Verdict determinism() {
  const auto m = gen_random_instance({.chains = 3, .max_states = 5, .metric = MetricKind::random, .reward_target = 2}, 3);
  int identical = 0, runs = 0;
  for (const auto& id : strategy_ids()) {
    ExperimentConfig c;
    c.strategy = id;
    c.trials = 500;
    c.seed = 2718;
    c.budget = 2.0;
    c.threads = 1;
    const std::string a = trial_records(serialize_report(run_experiment(c, m), false));
    c.threads = 3;
    const std::string b = trial_records(serialize_report(run_experiment(c, m), false));
    ++runs;
    identical += !a.empty() && a == b;
  }
  std::string cli_note = "CLI not built";
#ifdef MG_CLI_PATH
  {
    const auto dir = std::filesystem::temp_directory_path();
    const auto instance = dir / "mg_acceptance_instance.json";
    write_instance(m, instance);
    std::string outputs[2];
    for (int r = 0; r < 2; ++r) {
      const auto out = dir / ("mg_acceptance_run" + std::to_string(r) + ".jsonl");
      const std::string cmd = std::string(MG_CLI_PATH) + " simulate " + instance.string() +
                              " --strategy doubling-metric --trials 300 --seed 41 > " + out.string();
      if (std::system(cmd.c_str()) != 0) return {false, "CLI simulate failed"};
      outputs[r] = trial_records(read_text_file(out));
      std::filesystem::remove(out);
    }
    std::filesystem::remove(instance);
    ++runs;
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    identical += same;
    cli_note = same ? "CLI reruns byte-identical" : "CLI reruns differ";
  }
#endif
  return {identical == runs, fmt("%d/%d rerun pairs byte-identical; %s", identical, runs, cli_note.c_str())};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "closed-form grades", 1.0, closed_form_grades},
      {2, "fairness identity", 120.0, fairness_identity},
      {3, "stopping-value oracle equivalence", 60.0, stopping_equivalence},
      {4, "Banks-Sundaram indifference", 10.0, banks_sundaram},
      {5, "counterexample separation", 120.0, counterexample},
      {6, "budget safety", 120.0, budget_safety},
      {7, "empirical approximation ratio", 600.0, approximation_ratio},
      {8, "order statistics", 60.0, order_statistics},
      {9, "determinism", 30.0, determinism},
  };
  int passed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_seconds;
    const bool ok = v.pass && in_time;
    passed += ok;
    std::printf("[%s] criterion %d %s: %s; %.2f s (limit %g s%s)\n", ok ? "PASS" : "FAIL", c.id, c.name,
                v.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", exceeded");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
  return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
