#pragma once

#include "mg/strategy.hpp"

namespace mg::detail {

// Applies moves to a GameState and books their costs into an outcome.
class Player {
 public:
  Player(const GameModel& model, GameState& state, StrategyOutcome& outcome, RandomSource& rng, bool record)
      : model_(model), state_(state), outcome_(outcome), rng_(rng), record_(record) {}

  double switch_cost_to(ChainId j) const {
    return state_.location == j ? 0.0 : model_.instance().distance(state_.location, j);
  }

  void move_to(ChainId j) {
    if (state_.location == j) return;
    const double paid = model_.instance().distance(state_.location, j);
    outcome_.switching_cost += paid;
    outcome_.total_cost += paid;
    if (record_) outcome_.trajectory.record_switch(state_.location, j, paid);
    state_.location = j;
  }

  StateId position(ChainId j) const { return state_.positions[static_cast<std::size_t>(j)]; }
  double next_move_cost(ChainId j) const { return model_.chain(j).move_cost(position(j)); }

  // Plays chain j once (the player must stand on it). Returns true when the
  // chain reached its target, which also collects its reward.
  bool play(ChainId j) {
    const auto& chain = model_.chain(j);
    const StateId from = position(j);
    const StepResult r = step(chain, from, rng_);
    outcome_.movement_cost += r.cost;
    outcome_.total_cost += r.cost;
    if (record_) outcome_.trajectory.record_step(j, from, r.next, r.cost);
    state_.positions[static_cast<std::size_t>(j)] = r.next;
    if (r.next == chain.target) {
      state_.available[static_cast<std::size_t>(j)] = false;
      ++outcome_.rewards_collected;
      return true;
    }
    return false;
  }

  GameState& state() { return state_; }
  StrategyOutcome& outcome() { return outcome_; }

 private:
  const GameModel& model_;
  GameState& state_;
  StrategyOutcome& outcome_;
  RandomSource& rng_;
  bool record_;
};

}  // namespace mg::detail
