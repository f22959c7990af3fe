#pragma once

#include <span>
#include <vector>

#include "mg/selection_cost.hpp"

namespace mg {

/// Pr[at least k of independent Bernoulli(p_i) succeed], by the
/// Poisson-binomial recurrence.
double poisson_binomial_at_least(std::span<const double> p, int k);

/// Pr[K-th smallest of the independent selection costs <= x].
double order_statistic_cdf(std::span<const SelectionCostPMF> pmfs, int k, double x);

inline constexpr double kThresholdQuantile = 0.3;

struct ThresholdSelection {
  std::vector<double> sorted_grades;
  /// 1-based position j of gamma_j in sorted_grades; 0 is the sentinel used
  /// when the smallest grade already reaches the quantile.
  std::size_t chosen_index = 0;
  double gamma_j = 0.0;
  double gamma_j_plus_1 = 0.0;
};

/// Scans the ascending distinct grades of all states of the given chains for
/// the unique j with Pr[K-th order statistic <= gamma_j] < 0.3 and
/// Pr[<= gamma_{j+1}] >= 0.3.
ThresholdSelection select_threshold(std::span<const SelectionCostPMF> pmfs, std::vector<double> grades, int k);

}  // namespace mg
