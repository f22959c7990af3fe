#include <algorithm>
#include <limits>

#include "mg/strategy.hpp"
#include "player.hpp"

namespace mg {

std::vector<ChainId> GreedyEffectiveCostOrdering::order(const KtspInstance& in) const {
  const std::size_t n = in.candidates.size();
  std::vector<double> medians(n);
  for (std::size_t a = 0; a < n; ++a) medians[a] = in.pmfs[a].median();

  std::vector<ChainId> tour;
  tour.reserve(n);
  std::vector<bool> used(n, false);
  ChainId at = in.origin;
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = n;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < n; ++a) {
      if (used[a]) continue;
      const double score = in.metric->distance(at, in.candidates[a]) + medians[a];
      if (best == n || score < best_score || (score == best_score && in.candidates[a] < in.candidates[best])) {
        best = a;
        best_score = score;
      }
    }
    used[best] = true;
    at = in.candidates[best];
    tour.push_back(at);
  }
  return tour;
}

std::vector<ChainId> default_ordering(const KtspInstance& instance) {
  return GreedyEffectiveCostOrdering{}.order(instance);
}

BudgetMetricResult run_budget_mg_metric(const GameModel& model, GameState& state, int k, double budget, double alpha,
                                        const OrderingSolver& solver, RandomSource& rng, const PlayOptions& options) {
  if (!(budget > 0.0)) throw Error("budget must be positive");
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  BudgetMetricResult res;
  res.remaining_k = k;
  if (k <= 0) return res;

  KtspInstance ktsp;
  ktsp.metric = &model.instance();
  ktsp.origin = state.location;
  ktsp.k = k;
  for (ChainId i = 0; i < model.chain_count(); ++i) {
    if (!state.available[static_cast<std::size_t>(i)]) continue;
    ktsp.candidates.push_back(i);
    ktsp.pmfs.push_back(model.pmf(i, state.positions[static_cast<std::size_t>(i)]));
  }
  if (ktsp.candidates.empty()) return res;

  const std::vector<ChainId> tour = solver.order(ktsp);
  {
    auto sorted_tour = tour;
    auto sorted_candidates = ktsp.candidates;
    std::sort(sorted_tour.begin(), sorted_tour.end());
    std::sort(sorted_candidates.begin(), sorted_candidates.end());
    if (sorted_tour != sorted_candidates) throw Error("ordering solver did not return a permutation");
  }

  // Longest prefix whose tour length from the current location fits.
  const double tour_budget = kPrefixBudgetFactor * alpha * budget;
  std::vector<SelectionCostPMF> prefix_pmfs;
  double length = 0.0;
  ChainId at = state.location;
  for (ChainId i : tour) {
    const double hop = at == i ? 0.0 : model.instance().distance(at, i);
    if (length + hop > tour_budget) break;
    length += hop;
    at = i;
    res.prefix.push_back(i);
    const auto pos = std::find(ktsp.candidates.begin(), ktsp.candidates.end(), i) - ktsp.candidates.begin();
    prefix_pmfs.push_back(ktsp.pmfs[static_cast<std::size_t>(pos)]);
  }
  if (res.prefix.empty()) return res;

  std::vector<double> grades;
  for (ChainId i : res.prefix)
    for (double g : model.table(i).grade) grades.push_back(g);
  const int rank = std::min(k, static_cast<int>(res.prefix.size()));
  res.threshold = select_threshold(prefix_pmfs, std::move(grades), rank);
  const double cap = res.threshold->gamma_j_plus_1 + kLevelMergeTol;
  const double chain_budget = kChainMovementFactor * alpha * budget;

  detail::Player player(model, state, res.outcome, rng, options.record_trajectory);
  for (ChainId i : res.prefix) {
    if (res.remaining_k <= 0) break;
    player.move_to(i);
    double spent = 0.0;
    while (state.available[static_cast<std::size_t>(i)]) {
      // Condition (II): the current grade is above the threshold.
      if (model.grade(i, player.position(i)) > cap) break;
      // Condition (I): the next move would exceed this chain's movement budget.
      const double c = player.next_move_cost(i);
      if (spent + c > chain_budget) break;
      spent += c;
      if (player.play(i)) --res.remaining_k;
    }
  }
  return res;
}

StrategyOutcome run_doubling_metric(const GameModel& model, const DoublingParams& params, double alpha,
                                    const OrderingSolver& solver, RandomSource& rng, const PlayOptions& options) {
  GameState state = GameState::initial(model.instance());
  auto sub = [&](GameState& s, int k, double b, RandomSource& r) {
    BudgetMetricResult m = run_budget_mg_metric(model, s, k, b, alpha, solver, r, options);
    return BudgetResult{m.remaining_k, std::move(m.outcome)};
  };
  return run_doubling(model, state, model.instance().reward_target, params, sub, true, rng, options);
}

}  // namespace mg
