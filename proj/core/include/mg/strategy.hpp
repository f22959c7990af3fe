#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mg/grade.hpp"
#include "mg/markov_system.hpp"
#include "mg/order_statistics.hpp"
#include "mg/random.hpp"
#include "mg/selection_cost.hpp"

namespace mg {

/// Grade tables and selection-cost models for every chain of one instance.
/// Built once and shared read-only by all trials.
class GameModel {
 public:
  explicit GameModel(MetricInstance instance, double dummy_switch_cost = 1.0, double tol = kDefaultGradeTol);

  const MetricInstance& instance() const { return instance_; }
  int chain_count() const { return instance_.chain_count(); }
  const MarkovSystem& chain(ChainId i) const { return instance_.chains[static_cast<std::size_t>(i)]; }
  const GradeTable& table(ChainId i) const { return tables_[static_cast<std::size_t>(i)]; }
  const SelectionCostModel& selection(ChainId i) const { return selection_[static_cast<std::size_t>(i)]; }
  SelectionCostPMF pmf(ChainId i, StateId from) const { return selection(i).pmf(from); }
  double grade(ChainId i, StateId u) const { return table(i).grade[static_cast<std::size_t>(u)]; }
  double dummy_switch_cost() const { return dummy_switch_cost_; }

 private:
  MetricInstance instance_;
  double dummy_switch_cost_;
  std::vector<GradeTable> tables_;
  std::vector<SelectionCostModel> selection_;
};

struct PhaseRecord {
  int phase = 0;
  double budget = 0.0;
  int k_before = 0;
  int k_after = 0;
  double cost = 0.0;
};

struct StrategyOutcome {
  int rewards_collected = 0;
  double movement_cost = 0.0;
  double switching_cost = 0.0;
  double total_cost = 0.0;
  bool truncated = false;
  Trajectory trajectory;
  std::vector<PhaseRecord> phase_log;

  void absorb(const StrategyOutcome& phase);
};

struct PlayOptions {
  bool record_trajectory = false;
  /// Total cost above which a strategy stops and flags truncation.
  double safety_cap = 1e12;
};

/// Index of a chain: its grade when active, its dummy grade otherwise.
double current_index(const MarkovSystem& chain, StateId position, bool active, const GradeTable& table);

/// Repeatedly plays the available chain with the smallest index (ties by
/// lowest chain id) until the instance's reward target is met.
StrategyOutcome run_index_strategy(const GameModel& model, RandomSource& rng, const PlayOptions& options = {});

inline constexpr double kUnitBudgetFactor = 128.0;  // 2^7

struct BudgetResult {
  int remaining_k = 0;
  StrategyOutcome outcome;
};

/// Minimum-index play under separate movement and switching budgets of
/// 2^7 * budget each; stops when an action would break either budget, when
/// no chain is available, or when k rewards have been collected.
BudgetResult run_budget_mg_unit(const GameModel& model, GameState& state, int k, double budget, RandomSource& rng,
                                const PlayOptions& options = {});

struct DoublingParams {
  double beta = 1.5;
  double c = 1.0;
  int max_phases = 200;
};

/// Budgeted subroutine called by the doubling framework: (state, k, budget).
using BudgetedSubroutine = std::function<BudgetResult(GameState&, int, double, RandomSource&)>;

/// Calls `subroutine` with budgets c * beta^i for i = 1, 2, ... until no
/// rewards remain. When `return_to_root` is set the player walks back to the
/// root between phases and pays that distance.
StrategyOutcome run_doubling(const GameModel& model, GameState& state, int k, const DoublingParams& params,
                             const BudgetedSubroutine& subroutine, bool return_to_root, RandomSource& rng,
                             const PlayOptions& options = {});

StrategyOutcome run_doubling_unit(const GameModel& model, const DoublingParams& params, RandomSource& rng,
                                  const PlayOptions& options = {});

// ---------------------------------------------------------------------------
// Metric strategy

/// Stochastic k-TSP view handed to an ordering solver.
struct KtspInstance {
  const MetricInstance* metric = nullptr;
  ChainId origin = kRoot;
  std::vector<ChainId> candidates;
  std::vector<SelectionCostPMF> pmfs;  // parallel to candidates
  int k = 1;
};

/// Produces a non-adaptive visiting order. Must return a permutation of the
/// candidates and be deterministic for a fixed input.
class OrderingSolver {
 public:
  virtual ~OrderingSolver() = default;
  virtual std::vector<ChainId> order(const KtspInstance& instance) const = 0;
  virtual std::string name() const = 0;
};

/// Greedy tour: from the origin, repeatedly append the unvisited chain
/// minimizing distance plus median selection cost (ties by chain id).
class GreedyEffectiveCostOrdering final : public OrderingSolver {
 public:
  std::vector<ChainId> order(const KtspInstance& instance) const override;
  std::string name() const override { return "greedy-effective-cost"; }
};

std::vector<ChainId> default_ordering(const KtspInstance& instance);

inline constexpr double kPrefixBudgetFactor = 10.0;
inline constexpr double kChainMovementFactor = 100.0;

struct BudgetMetricResult {
  int remaining_k = 0;
  StrategyOutcome outcome;
  std::vector<ChainId> prefix;
  std::optional<ThresholdSelection> threshold;
};

/// One budgeted pass of the metric strategy: order the available chains,
/// keep the longest prefix whose tour length fits 10 * alpha * budget, pick
/// the grade threshold from the K-th order statistic of the prefix's
/// selection costs, then visit the prefix once, playing each chain while its
/// grade stays at or below the threshold and its movement fits
/// 100 * alpha * budget.
BudgetMetricResult run_budget_mg_metric(const GameModel& model, GameState& state, int k, double budget, double alpha,
                                        const OrderingSolver& solver, RandomSource& rng,
                                        const PlayOptions& options = {});

StrategyOutcome run_doubling_metric(const GameModel& model, const DoublingParams& params, double alpha,
                                    const OrderingSolver& solver, RandomSource& rng, const PlayOptions& options = {});

struct FairGreedyResult {
  int rewards = 0;
  double fair_cost = 0.0;
  double movement_cost = 0.0;
};

/// Reference strategy for the fair game on a set of chains: always plays the
/// chain whose current state has the smallest grade, paying a chain's
/// prevailing cost when it reaches its target. Stops at k rewards or when
/// finishing the next chain at its current prevailing cost would exceed
/// fair_budget. Switching is free.
FairGreedyResult run_fair_greedy(const GameModel& model, const std::vector<ChainId>& chains, int k,
                                 double fair_budget, RandomSource& rng);

/// Visits chains in `order` once, playing each while its grade is at most
/// grade_cap; chains left unfinished are then played to their targets in the
/// same order until the reward target is met.
StrategyOutcome run_sequential(const GameModel& model, const std::vector<ChainId>& order, double grade_cap,
                               RandomSource& rng, const PlayOptions& options = {});

}  // namespace mg
