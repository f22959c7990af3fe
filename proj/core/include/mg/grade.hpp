#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mg/markov_system.hpp"
#include "mg/random.hpp"

namespace mg {

inline constexpr double kDefaultGradeTol = 1e-9;

/// Optimal solution of the single-chain stopping game in which reaching the
/// target pays `profit_level` and every play costs the state's move cost.
struct StoppingSolution {
  double profit_level = 0.0;
  /// Optimal value from every state; values[target] == profit_level.
  Eigen::VectorXd values;
  /// States where quitting is optimal (ties resolve toward quitting).
  std::vector<StateId> quit_set;
  int iterations = 0;

  bool quits(StateId u) const;
};

/// Policy iteration over quit sets with an exact linear solve per policy.
StoppingSolution stopping_value(const MarkovSystem& system, double profit_level);

/// Expected movement cost of a player that never quits, for every state.
Eigen::VectorXd never_quit_costs(const MarkovSystem& system);
double never_quit_cost(const MarkovSystem& system, StateId from);

/// Grade of `state`: the largest profit level at which the stopping game
/// started at `state` is still worth exactly zero. Binary search over
/// [0, never_quit_cost(state)] to absolute precision `tol`, then snapped to
/// the root of the linear piece of the value function found at the upper end.
double compute_grade(const MarkovSystem& system, StateId state, double tol = kDefaultGradeTol);

/// Grades of every state (target gets 0).
std::vector<double> compute_grades(const MarkovSystem& system, double tol = kDefaultGradeTol);

struct GradeTable {
  std::vector<double> grade;
  /// Grade of the dummy predecessor of each state; 0 for the target.
  std::vector<double> dummy_grade;
  double switch_cost_used = 0.0;

  /// Active chains are ranked by grade, inactive ones by dummy grade.
  double index(StateId u, bool active) const {
    const auto i = static_cast<std::size_t>(u);
    return active ? grade[i] : dummy_grade[i];
  }
};

GradeTable compute_grade_table(const MarkovSystem& system, double switch_cost,
                               double tol = kDefaultGradeTol);

/// Running maximum of grades along a path and its constant runs.
struct PrevailingRecord {
  std::vector<double> prevailing;
  /// Index into `prevailing` where each epoch begins.
  std::vector<std::size_t> epoch_starts;

  std::size_t epoch_count() const { return epoch_starts.size(); }
};

PrevailingRecord prevailing_and_epochs(std::span<const StateId> path, const GradeTable& table);

struct TeasingOutcome {
  double prevailing_cost = 0.0;
  double movement_cost = 0.0;
};

/// Never-quitting player of the teasing game from the system's start: returns
/// the final prevailing cost and the movement cost paid.
TeasingOutcome simulate_teasing(const MarkovSystem& system, const GradeTable& table, RandomSource& rng,
                                long long step_cap = 10'000'000);
TeasingOutcome simulate_teasing(const MarkovSystem& system, RandomSource& rng);

}  // namespace mg
