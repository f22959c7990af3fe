#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "mg/oracle.hpp"
#include "mg/scenarios.hpp"
#include "mg/strategy.hpp"
#include "reference.hpp"

using namespace mg;

namespace {

MetricInstance two_delta() { return make_instance({delta_chain(1.0), delta_chain(5.0)}, unit_metric(2), 1); }

}  // namespace

TEST(Oracle, TwoDeltaChains) {
  const auto m = two_delta();
  const auto r = solve_optimal(m, 1);
  EXPECT_NEAR(r.optimal_expected_cost, 2.0, 1e-12);
  EXPECT_NEAR(mgtest::reference_joint_value(m, 1, kRoot), 2.0, 1e-12);
  EXPECT_EQ(r.action(r.start()), 0);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.residual, 1e-10);
}

TEST(Oracle, SingleMixtureAtDistanceOne) {
  const auto m = make_instance({mixture_chain(0.8, 0.01)}, unit_metric(1), 1);
  EXPECT_NEAR(solve_optimal(m, 1).optimal_expected_cost, 1.81, 1e-10);
}

TEST(Oracle, BanksSundaramPlayStart) {
  const double x = 0.8, c = 0.01;
  const auto m = banks_sundaram_instance(x, c);
  EXPECT_NEAR(m.chains[0].move_cost(0), 0.14, 1e-15);
  const auto r = solve_optimal(m, 1, 0);
  EXPECT_NEAR(r.optimal_expected_cost, 0.14, 1e-9);
  EXPECT_NEAR(action_value(m, 1, 0, 0), 0.14, 1e-9);
  EXPECT_NEAR(action_value(m, 1, 0, 1), 0.14, 1e-9);
}

TEST(Oracle, BanksSundaramMixtureStart) {
  const double x = 0.8, c = 0.01;
  const auto m = banks_sundaram_instance(x, c, banks_sundaram_nu(x, c));
  EXPECT_NEAR(action_value(m, 1, 1, 1), 0.05, 1e-9);
  EXPECT_NEAR(action_value(m, 1, 1, 0), 0.05, 1e-9);
}

TEST(Oracle, IndifferenceOnGrid) {
  for (double x : {0.2, 0.4, 0.5, 0.8})
    for (double c : {0.01, 0.05}) {
      if (3 * c > 1 - x) continue;
      const auto mu = banks_sundaram_instance(x, c);
      EXPECT_LE(std::abs(action_value(mu, 1, 0, 0) - action_value(mu, 1, 0, 1)), 1e-9) << x << " " << c;
      const auto nu = banks_sundaram_instance(x, c, banks_sundaram_nu(x, c));
      EXPECT_LE(std::abs(action_value(nu, 1, 1, 1) - action_value(nu, 1, 1, 0)), 1e-9) << x << " " << c;
    }
}

TEST(Oracle, MatchesSeparateSwitchFormulation) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto m = gen_random_instance(
        {.chains = 3, .max_states = 3, .metric = seed % 2 ? MetricKind::random : MetricKind::unit}, seed);
    for (int k = 1; k <= 3; ++k) {
      const double ours = solve_optimal(m, k).optimal_expected_cost;
      EXPECT_NEAR(ours, mgtest::reference_joint_value(m, k, kRoot), 1e-8) << "seed " << seed << " k " << k;
    }
  }
}

TEST(Oracle, MonotoneInRewardTarget) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto m = gen_random_instance({.chains = 4, .max_states = 4, .metric = MetricKind::random}, seed);
    double prev = 0.0;
    for (int k = 1; k <= 4; ++k) {
      const double v = solve_optimal(m, k).optimal_expected_cost;
      EXPECT_GE(v, prev - 1e-12);
      prev = v;
    }
  }
}

TEST(Oracle, ResidualAndTighterTolerance) {
  const auto m = gen_random_instance({.chains = 3, .max_states = 5, .reward_target = 2}, 4);
  const auto loose = solve_optimal(m, 2);
  EXPECT_TRUE(loose.converged);
  EXPECT_LE(loose.residual, 1e-10);
  const auto tight = solve_optimal(m, 2, kRoot, {.tol = 1e-13});
  EXPECT_NEAR(loose.optimal_expected_cost, tight.optimal_expected_cost, 1e-8);
}

TEST(Oracle, ValueAndPolicyQueries) {
  const auto m = paper_micro();
  const auto r = solve_optimal(m, 2);
  JointState s = r.start();
  EXPECT_NEAR(r.value(s), r.optimal_expected_cost, 1e-12);
  const ChainId a = r.action(s);
  EXPECT_NEAR(r.action_value(s, a), r.optimal_expected_cost, 1e-12);
  for (ChainId j = 0; j < 3; ++j) EXPECT_GE(r.action_value(s, j), r.optimal_expected_cost - 1e-12);
  s.positions = {1, 1, 0};
  EXPECT_TRUE(r.terminal(s));
  EXPECT_EQ(r.value(s), 0.0);
  EXPECT_THROW(r.action_value(s, 2), Error);
}

TEST(Oracle, Errors) {
  const auto m = two_delta();
  try {
    solve_optimal(m, 1, kRoot, {.state_cap = 3});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "instance too large for oracle");
  }
  EXPECT_THROW(solve_optimal(m, 3), Error);
  EXPECT_THROW(solve_optimal(m, 0), Error);
  EXPECT_THROW(action_value(m, 1, kRoot, 5), Error);
  auto finished = m;
  finished.chain_positions = {1, 0};
  EXPECT_THROW(action_value(finished, 1, kRoot, 0), Error);
  EXPECT_THROW(solve_optimal(finished, 2), Error);
  const auto huge = dtw_counterexample({0.1, 200, 1e6});
  EXPECT_THROW(solve_optimal(huge, 1), Error);
}

TEST(SimulatePolicy, TwoDeltaIsExact) {
  const auto m = two_delta();
  const auto r = solve_optimal(m, 1);
  RandomSource rng(1);
  const auto e = simulate_policy(r, m, rng, 1000);
  EXPECT_DOUBLE_EQ(e.mean, 2.0);
  EXPECT_DOUBLE_EQ(e.standard_error, 0.0);
}

TEST(SimulatePolicy, MixtureMatchesSolve) {
  const auto m = make_instance({mixture_chain(0.8, 0.01)}, unit_metric(1), 1);
  const auto r = solve_optimal(m, 1);
  RandomSource rng(2);
  const auto e = simulate_policy(r, m, rng, 100000);
  EXPECT_LE(std::abs(e.mean - 1.81), 3 * e.standard_error);
  RandomSource again(2);
  EXPECT_EQ(simulate_policy(r, m, again, 100000).mean, e.mean);
  EXPECT_THROW(simulate_policy(r, m, rng, 0), Error);
}

TEST(SimulatePolicy, StrategiesNeverBeatTheOracle) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto m = gen_random_instance({.chains = 3, .max_states = 4, .reward_target = 1 + int(seed % 2)}, seed);
    const double opt = solve_optimal(m, m.reward_target).optimal_expected_cost;
    const GameModel model(m);
    std::vector<ChainId> order(3);
    std::iota(order.begin(), order.end(), 0);
    for (int which = 0; which < 3; ++which) {
      const int n = 20000;
      double sum = 0.0, sq = 0.0;
      for (int t = 0; t < n; ++t) {
        RandomSource rng(seed, static_cast<std::uint64_t>(t));
        double cost = 0.0;
        if (which == 0) cost = run_index_strategy(model, rng).total_cost;
        if (which == 1) cost = run_doubling_unit(model, {}, rng).total_cost;
        if (which == 2) cost = run_sequential(model, order, 1.0, rng).total_cost;
        sum += cost;
        sq += cost * cost;
      }
      const double mean = sum / n;
      const double se = std::sqrt(std::max(0.0, sq / n - mean * mean) / (n - 1));
      EXPECT_GE(mean, opt - 3 * se - 1e-12) << "seed " << seed << " strategy " << which;
    }
  }
}

TEST(Witness, IndexReversalValues) {
  const auto r = banks_sundaram_witness(0.8, 0.4, 0.01);
  EXPECT_NEAR(r.active_index, 0.05, 1e-15);
  EXPECT_NEAR(r.inactive_index, 0.04, 1e-15);
  EXPECT_NEAR(r.mu, 0.14, 1e-15);
  EXPECT_NEAR(r.nu, 0.04, 1e-15);
  EXPECT_TRUE(r.contradiction);
}

TEST(Witness, EqualProbabilitiesGiveNoContradiction) {
  const auto r = banks_sundaram_witness(0.8, 0.8, 0.01);
  EXPECT_NEAR(r.active_index, 0.05, 1e-15);
  EXPECT_NEAR(r.inactive_index, 0.14, 1e-15);
  EXPECT_FALSE(r.contradiction);
}

TEST(Witness, ConstraintViolationsAreNamed) {
  try {
    banks_sundaram_witness(0.8, 0.4, 0.1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("3c <= 1 - x"), std::string::npos);
  }
  EXPECT_THROW(banks_sundaram_witness(0.9, 0.1, 0.01), Error);
  EXPECT_THROW(banks_sundaram_witness(0.4, 0.8, 0.01), Error);
  EXPECT_THROW(banks_sundaram_witness(0.4, 0.2, 0.0), Error);
}
