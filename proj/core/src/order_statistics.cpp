#include "mg/order_statistics.hpp"

#include <algorithm>

namespace mg {

double poisson_binomial_at_least(std::span<const double> p, int k) {
  const int n = static_cast<int>(p.size());
  if (k < 1 || k > n) throw Error("order statistic rank out of range");
  // dist[j] = Pr[exactly j successes among the chains seen so far].
  std::vector<double> dist(static_cast<std::size_t>(n) + 1, 0.0);
  dist[0] = 1.0;
  for (int i = 0; i < n; ++i) {
    const double q = std::clamp(p[static_cast<std::size_t>(i)], 0.0, 1.0);
    for (int j = i + 1; j >= 1; --j)
      dist[static_cast<std::size_t>(j)] = dist[static_cast<std::size_t>(j)] * (1.0 - q) + dist[static_cast<std::size_t>(j - 1)] * q;
    dist[0] *= 1.0 - q;
  }
  double tail = 0.0;
  for (int j = k; j <= n; ++j) tail += dist[static_cast<std::size_t>(j)];
  return std::clamp(tail, 0.0, 1.0);
}

double order_statistic_cdf(std::span<const SelectionCostPMF> pmfs, int k, double x) {
  std::vector<double> p;
  p.reserve(pmfs.size());
  for (const auto& f : pmfs) p.push_back(f.cdf(x));
  return poisson_binomial_at_least(p, k);
}

ThresholdSelection select_threshold(std::span<const SelectionCostPMF> pmfs, std::vector<double> grades, int k) {
  if (k < 1 || k > static_cast<int>(pmfs.size())) throw Error("order statistic rank out of range");
  ThresholdSelection sel;
  sel.sorted_grades = merge_levels(std::move(grades));
  if (sel.sorted_grades.empty()) throw Error("threshold unreachable");

  const auto& g = sel.sorted_grades;
  if (order_statistic_cdf(pmfs, k, g.front()) >= kThresholdQuantile) {
    sel.chosen_index = 0;
    sel.gamma_j = 0.0;
    sel.gamma_j_plus_1 = g.front();
    return sel;
  }
  // The CDF is nondecreasing in x, so the first crossing is the unique one.
  for (std::size_t j = 1; j < g.size(); ++j) {
    if (order_statistic_cdf(pmfs, k, g[j]) >= kThresholdQuantile) {
      sel.chosen_index = j;
      sel.gamma_j = g[j - 1];
      sel.gamma_j_plus_1 = g[j];
      return sel;
    }
  }
  throw Error("threshold unreachable");
}

}  // namespace mg
