#include "mg/selection_cost.hpp"

#include <algorithm>
#include <cmath>

namespace mg {

double SelectionCostPMF::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * mass[i];
  return m;
}

double SelectionCostPMF::total_mass() const {
  double m = 0.0;
  for (double p : mass) m += p;
  return m;
}

double SelectionCostPMF::cdf(double x) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (support[i] <= x + kLevelMergeTol) c += mass[i];
  return std::min(1.0, c);
}

double SelectionCostPMF::quantile(double q) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    c += mass[i];
    if (c >= q - 1e-12) return support[i];
  }
  return support.empty() ? 0.0 : support.back();
}

std::vector<double> merge_levels(std::vector<double> values, double tol) {
  std::sort(values.begin(), values.end());
  std::vector<double> out;
  for (double v : values) {
    if (!out.empty() && v - out.back() <= tol) out.back() = v;
    else out.push_back(v);
  }
  return out;
}

SelectionCostModel::SelectionCostModel(const MarkovSystem& s, const std::vector<double>& grades)
    : levels_(merge_levels(grades)) {
  const int n = s.size();
  cdf_ = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(levels_.size()));
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const double level = levels_[l];
    std::vector<int> admissible;
    for (int v = 0; v < n; ++v)
      if (v != s.target && grades[static_cast<std::size_t>(v)] <= level) admissible.push_back(v);
    const int m = static_cast<int>(admissible.size());
    const auto col = static_cast<Eigen::Index>(l);
    cdf_(s.target, col) = 1.0;
    if (m == 0) continue;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      const int v = admissible[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) a(i, j) -= s.transition(v, admissible[static_cast<std::size_t>(j)]);
      b(i) = s.transition(v, s.target);
    }
    const Eigen::VectorXd x = a.partialPivLu().solve(b);
    for (int i = 0; i < m; ++i) cdf_(admissible[static_cast<std::size_t>(i)], col) = x(i);
  }
}

SelectionCostPMF SelectionCostModel::pmf(StateId from) const {
  SelectionCostPMF out;
  double previous = 0.0;
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const double c = cdf_(from, static_cast<Eigen::Index>(l));
    double m = c - previous;
    if (m < 0.0) m = 0.0;  // solver noise on a flat stretch of the CDF
    if (m > 1e-15) {
      out.support.push_back(levels_[l]);
      out.mass.push_back(m);
    }
    previous = std::max(previous, c);
  }
  return out;
}

SelectionCostPMF selection_cost_pmf(const MarkovSystem& s, const std::vector<double>& grades, StateId from) {
  return SelectionCostModel(s, grades).pmf(from);
}

SelectionCostPMF selection_cost_pmf(const MarkovSystem& s, double tol) {
  return selection_cost_pmf(s, compute_grades(s, tol), s.start);
}

}  // namespace mg
