#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mg/grade.hpp"
#include "mg/order_statistics.hpp"
#include "mg/scenarios.hpp"
#include "mg/selection_cost.hpp"
#include "reference.hpp"

using namespace mg;

namespace {

SelectionCostPMF point_mass(double a) { return SelectionCostPMF{{a}, {1.0}}; }

}  // namespace

// -----------------------------------------------------------------------------
// Selection-cost PMF
// -----------------------------------------------------------------------------

TEST(SelectionCost, DeltaIsPointMass) {
  const auto pmf = selection_cost_pmf(delta_chain(0.7));
  ASSERT_EQ(pmf.support.size(), 1U);
  EXPECT_NEAR(pmf.support[0], 0.7, 1e-8);
  EXPECT_NEAR(pmf.mass[0], 1.0, 1e-12);
}

TEST(SelectionCost, Mixture) {
  const auto pmf = selection_cost_pmf(mixture_chain(0.8, 0.01));
  ASSERT_EQ(pmf.support.size(), 2U);
  EXPECT_NEAR(pmf.support[0], 0.05, 1e-8);
  EXPECT_NEAR(pmf.support[1], 1.0, 1e-8);
  EXPECT_NEAR(pmf.mass[0], 0.2, 1e-12);
  EXPECT_NEAR(pmf.mass[1], 0.8, 1e-12);
  EXPECT_NEAR(pmf.mean(), 0.81, 1e-8);
  EXPECT_NEAR(pmf.cdf(0.05), 0.2, 1e-12);
  EXPECT_NEAR(pmf.cdf(0.04), 0.0, 1e-12);
  EXPECT_NEAR(pmf.quantile(0.3), 1.0, 1e-8);
  EXPECT_NEAR(pmf.median(), 1.0, 1e-8);
}

TEST(SelectionCost, MergeLevelsKeepsLargestMember) {
  const auto levels = merge_levels({1.0, 0.5, 1.0 + 5e-10, 0.5, 2.0});
  ASSERT_EQ(levels.size(), 3U);
  EXPECT_DOUBLE_EQ(levels[0], 0.5);
  EXPECT_DOUBLE_EQ(levels[1], 1.0 + 5e-10);
  EXPECT_DOUBLE_EQ(levels[2], 2.0);
}

TEST(SelectionCost, CdfMatrixIsMonotoneInLevel) {
  RandomSource rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gen_random_system(6, 0.0, 1.0, rng);
    const SelectionCostModel model(s, compute_grades(s));
    for (StateId v = 0; v < s.size(); ++v)
      for (std::size_t l = 1; l < model.levels().size(); ++l)
        EXPECT_GE(model.cdf_at_level(l, v) + 1e-12, model.cdf_at_level(l - 1, v));
  }
}

TEST(SelectionCost, FairnessIdentityAndAugmentedChainOracle) {
  RandomSource rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen_random_system(6, 0.0, 1.0, rng);
    const auto grades = compute_grades(s);
    for (StateId from = 0; from < s.size(); ++from) {
      if (from == s.target) continue;
      const auto pmf = selection_cost_pmf(s, grades, from);
      EXPECT_NEAR(pmf.total_mass(), 1.0, 1e-10);
      for (double m : pmf.mass) EXPECT_GE(m, 0.0);
      EXPECT_TRUE(std::is_sorted(pmf.support.begin(), pmf.support.end()));
      EXPECT_NEAR(pmf.mean(), never_quit_cost(s, from), 1e-8) << "trial " << trial;

      const auto law = mgtest::prevailing_law(s, grades, from);
      for (const auto& [level, mass] : law) {
        if (mass < 1e-12) continue;
        EXPECT_NEAR(pmf.cdf(level) - pmf.cdf(level - 1e-7), mass, 1e-9) << "trial " << trial << " level " << level;
      }
    }
  }
}

// -----------------------------------------------------------------------------
// Order statistics
// -----------------------------------------------------------------------------

TEST(PoissonBinomial, SmallCases) {
  const std::vector<double> p{0.5, 0.5};
  EXPECT_NEAR(poisson_binomial_at_least(p, 1), 0.75, 1e-15);
  EXPECT_NEAR(poisson_binomial_at_least(p, 2), 0.25, 1e-15);
  EXPECT_THROW(poisson_binomial_at_least(p, 0), Error);
  EXPECT_THROW(poisson_binomial_at_least(p, 3), Error);
}

TEST(OrderStatistic, SingleChainEqualsItsCdf) {
  const std::vector<SelectionCostPMF> one{selection_cost_pmf(mixture_chain(0.8, 0.01))};
  for (double x : {0.0, 0.05, 0.5, 1.0})
    EXPECT_NEAR(order_statistic_cdf(one, 1, x), one[0].cdf(x), 1e-15);
}

TEST(OrderStatistic, TwoDeterministicChains) {
  const std::vector<SelectionCostPMF> pmfs{point_mass(1.0), point_mass(2.0)};
  EXPECT_DOUBLE_EQ(order_statistic_cdf(pmfs, 2, 1.5), 0.0);
  EXPECT_DOUBLE_EQ(order_statistic_cdf(pmfs, 2, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(order_statistic_cdf(pmfs, 1, 1.0), 1.0);
}

TEST(OrderStatistic, TwinMixtures) {
  const auto m = selection_cost_pmf(mixture_chain(0.8, 0.01));
  const std::vector<SelectionCostPMF> pmfs{m, m};
  EXPECT_NEAR(order_statistic_cdf(pmfs, 1, 0.05), 0.36, 1e-10);
  EXPECT_THROW(order_statistic_cdf(pmfs, 0, 0.05), Error);
  EXPECT_THROW(order_statistic_cdf(pmfs, 3, 0.05), Error);
}

TEST(OrderStatistic, MatchesEnumeration) {
  RandomSource rng(8);
  for (int suite = 0; suite < 30; ++suite) {
    const int n = 2 + static_cast<int>(rng.below(3));
    std::vector<SelectionCostPMF> pmfs;
    std::vector<double> points;
    for (int i = 0; i < n; ++i) {
      pmfs.push_back(selection_cost_pmf(gen_random_system(5, 0.0, 1.0, rng)));
      points.insert(points.end(), pmfs.back().support.begin(), pmfs.back().support.end());
    }
    for (int k = 1; k <= n; ++k)
      for (double x : points)
        EXPECT_NEAR(order_statistic_cdf(pmfs, k, x), mgtest::enumerate_order_statistic_cdf(pmfs, k, x), 1e-12);
  }
}

// -----------------------------------------------------------------------------
// Threshold selection
// -----------------------------------------------------------------------------

TEST(Threshold, TwinMixtures) {
  const auto s = mixture_chain(0.8, 0.01);
  const auto m = selection_cost_pmf(s);
  const std::vector<SelectionCostPMF> pmfs{m, m};
  const auto g = compute_grades(s);
  std::vector<double> grades = g;
  grades.insert(grades.end(), g.begin(), g.end());
  const ThresholdSelection sel = select_threshold(pmfs, grades, 1);
  EXPECT_NEAR(sel.gamma_j, 0.0, 1e-8);
  EXPECT_NEAR(sel.gamma_j_plus_1, 0.05, 1e-8);
  EXPECT_EQ(sel.chosen_index, 1U);
  EXPECT_LT(order_statistic_cdf(pmfs, 1, sel.gamma_j), kThresholdQuantile);
  EXPECT_GE(order_statistic_cdf(pmfs, 1, sel.gamma_j_plus_1), kThresholdQuantile);
}

TEST(Threshold, SingleDelta) {
  const std::vector<SelectionCostPMF> pmfs{selection_cost_pmf(delta_chain(0.5))};
  const auto sel = select_threshold(pmfs, {0.0, 0.5}, 1);
  EXPECT_NEAR(sel.gamma_j_plus_1, 0.5, 1e-8);
  EXPECT_NEAR(sel.gamma_j, 0.0, 1e-12);
}

TEST(Threshold, SentinelWhenSmallestGradeSuffices) {
  const std::vector<SelectionCostPMF> pmfs{point_mass(0.5)};
  const auto sel = select_threshold(pmfs, {0.5, 1.0}, 1);
  EXPECT_EQ(sel.chosen_index, 0U);
  EXPECT_DOUBLE_EQ(sel.gamma_j_plus_1, 0.5);
}

TEST(Threshold, RankBeyondChainsFails) {
  const auto m = selection_cost_pmf(mixture_chain(0.8, 0.01));
  const std::vector<SelectionCostPMF> pmfs{m, m};
  EXPECT_THROW(select_threshold(pmfs, {0.0, 0.05, 1.0}, 3), Error);
}

TEST(Threshold, UnreachableWhenGradesTooSmall) {
  const std::vector<SelectionCostPMF> pmfs{point_mass(2.0)};
  try {
    select_threshold(pmfs, {0.0, 1.0}, 1);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "threshold unreachable");
  }
}
