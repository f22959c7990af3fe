#pragma once

#include <vector>

#include <Eigen/Dense>

#include "mg/grade.hpp"
#include "mg/markov_system.hpp"

namespace mg {

/// Grade levels closer than this are treated as one level.
inline constexpr double kLevelMergeTol = 1e-9;

/// Finite-support law of the prevailing cost paid by a never-quitting player.
struct SelectionCostPMF {
  std::vector<double> support;  // ascending
  std::vector<double> mass;

  double mean() const;
  double total_mass() const;
  /// Pr[cost <= x]; support points within kLevelMergeTol above x count.
  double cdf(double x) const;
  /// Smallest support point whose CDF reaches q.
  double quantile(double q) const;
  double median() const { return quantile(0.5); }
};

/// Sorted distinct values, merging runs whose consecutive gaps are at most
/// `tol`. Each merged run is represented by its largest member.
std::vector<double> merge_levels(std::vector<double> values, double tol = kLevelMergeTol);

/// Per-level absorption probabilities for one system. For grade level L the
/// column holds, for every state v, the probability that a never-quitting
/// player started at v reaches the target without visiting a state whose
/// grade exceeds L, which is the CDF of the prevailing cost at L.
class SelectionCostModel {
 public:
  SelectionCostModel() = default;
  SelectionCostModel(const MarkovSystem& system, const std::vector<double>& grades);

  const std::vector<double>& levels() const { return levels_; }
  double cdf_at_level(std::size_t level, StateId from) const { return cdf_(from, static_cast<Eigen::Index>(level)); }
  SelectionCostPMF pmf(StateId from) const;

 private:
  std::vector<double> levels_;
  Eigen::MatrixXd cdf_;  // states x levels
};

SelectionCostPMF selection_cost_pmf(const MarkovSystem& system, double tol = kDefaultGradeTol);
SelectionCostPMF selection_cost_pmf(const MarkovSystem& system, const std::vector<double>& grades, StateId from);

}  // namespace mg
