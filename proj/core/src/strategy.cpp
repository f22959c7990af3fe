#include "mg/strategy.hpp"

#include <cmath>
#include <limits>

#include "player.hpp"

namespace mg {

GameModel::GameModel(MetricInstance instance, double dummy_switch_cost, double tol)
    : instance_(std::move(instance)), dummy_switch_cost_(dummy_switch_cost) {
  instance_.reset_positions();
  tables_.reserve(instance_.chains.size());
  selection_.reserve(instance_.chains.size());
  for (const auto& chain : instance_.chains) {
    tables_.push_back(compute_grade_table(chain, dummy_switch_cost, tol));
    selection_.emplace_back(chain, tables_.back().grade);
  }
}

void StrategyOutcome::absorb(const StrategyOutcome& phase) {
  rewards_collected += phase.rewards_collected;
  movement_cost += phase.movement_cost;
  switching_cost += phase.switching_cost;
  total_cost += phase.total_cost;
  truncated = truncated || phase.truncated;
  for (const auto& s : phase.trajectory.segments) trajectory.segments.push_back(s);
  for (const auto& e : phase.trajectory.switches) trajectory.switches.push_back(e);
}

double current_index(const MarkovSystem& chain, StateId position, bool active, const GradeTable& table) {
  if (position == chain.target) throw Error("chain finished");
  return table.index(position, active);
}

namespace {

// Available chain with the smallest index; kRoot when none is available.
ChainId argmin_index(const GameModel& model, const GameState& state) {
  ChainId best = kRoot;
  double best_index = std::numeric_limits<double>::infinity();
  for (ChainId i = 0; i < model.chain_count(); ++i) {
    if (!state.available[static_cast<std::size_t>(i)]) continue;
    const double idx = current_index(model.chain(i), state.positions[static_cast<std::size_t>(i)],
                                     state.location == i, model.table(i));
    if (best == kRoot || idx < best_index) {
      best = i;
      best_index = idx;
    }
  }
  return best;
}

}  // namespace

StrategyOutcome run_index_strategy(const GameModel& model, RandomSource& rng, const PlayOptions& options) {
  StrategyOutcome out;
  GameState state = GameState::initial(model.instance());
  detail::Player player(model, state, out, rng, options.record_trajectory);
  const int goal = model.instance().reward_target;
  while (out.rewards_collected < goal) {
    const ChainId next = argmin_index(model, state);
    if (next == kRoot) break;
    if (out.total_cost > options.safety_cap) {
      out.truncated = true;
      break;
    }
    player.move_to(next);
    player.play(next);
  }
  return out;
}

BudgetResult run_budget_mg_unit(const GameModel& model, GameState& state, int k, double budget, RandomSource& rng,
                                const PlayOptions& options) {
  if (!(budget > 0.0)) throw Error("budget must be positive");
  BudgetResult res;
  res.remaining_k = k;
  detail::Player player(model, state, res.outcome, rng, options.record_trajectory);
  const double limit = kUnitBudgetFactor * budget;
  while (res.remaining_k > 0) {
    const ChainId next = argmin_index(model, state);
    if (next == kRoot) break;
    // Condition A: the next action keeps both running totals within budget.
    if (res.outcome.switching_cost + player.switch_cost_to(next) > limit) break;
    if (res.outcome.movement_cost + player.next_move_cost(next) > limit) break;
    player.move_to(next);
    if (player.play(next)) --res.remaining_k;
  }
  return res;
}

StrategyOutcome run_doubling(const GameModel& model, GameState& state, int k, const DoublingParams& params,
                             const BudgetedSubroutine& subroutine, bool return_to_root, RandomSource& rng,
                             const PlayOptions& options) {
  if (!(params.beta > 1.0 && params.beta < 2.0)) throw Error("beta must lie in (1, 2)");
  if (!(params.c > 0.0)) throw Error("doubling constant c must be positive");
  StrategyOutcome total;
  int remaining = k;
  double scale = 1.0;
  for (int phase = 1; remaining > 0; ++phase) {
    if (phase > params.max_phases || total.total_cost > options.safety_cap) {
      total.truncated = true;
      break;
    }
    scale *= params.beta;
    const double budget = params.c * scale;
    BudgetResult r = subroutine(state, remaining, budget, rng);
    PhaseRecord rec{phase, budget, remaining, r.remaining_k, r.outcome.total_cost};
    remaining = r.remaining_k;
    total.absorb(r.outcome);
    if (remaining > 0 && return_to_root && state.location != kRoot) {
      StrategyOutcome back;
      detail::Player(model, state, back, rng, options.record_trajectory).move_to(kRoot);
      rec.cost += back.total_cost;
      total.absorb(back);
    }
    total.phase_log.push_back(rec);
    if (remaining > 0 && state.available_count() == 0) {
      total.truncated = true;
      break;
    }
  }
  return total;
}

StrategyOutcome run_doubling_unit(const GameModel& model, const DoublingParams& params, RandomSource& rng,
                                  const PlayOptions& options) {
  GameState state = GameState::initial(model.instance());
  auto sub = [&](GameState& s, int k, double b, RandomSource& r) {
    return run_budget_mg_unit(model, s, k, b, r, options);
  };
  return run_doubling(model, state, model.instance().reward_target, params, sub, false, rng, options);
}

FairGreedyResult run_fair_greedy(const GameModel& model, const std::vector<ChainId>& chains, int k,
                                 double fair_budget, RandomSource& rng) {
  FairGreedyResult res;
  std::vector<StateId> pos;
  std::vector<double> prevailing;
  std::vector<bool> done;
  for (ChainId i : chains) {
    const StateId p = model.instance().chain_positions[static_cast<std::size_t>(i)];
    pos.push_back(p);
    prevailing.push_back(model.grade(i, p));
    done.push_back(p == model.chain(i).target);
  }
  while (res.rewards < k) {
    std::size_t best = chains.size();
    double best_grade = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < chains.size(); ++a) {
      if (done[a]) continue;
      const double g = model.grade(chains[a], pos[a]);
      if (best == chains.size() || g < best_grade || (g == best_grade && chains[a] < chains[best])) {
        best = a;
        best_grade = g;
      }
    }
    if (best == chains.size()) break;
    if (res.fair_cost + std::max(prevailing[best], best_grade) > fair_budget) break;
    const ChainId id = chains[best];
    const StepResult r = step(model.chain(id), pos[best], rng);
    res.movement_cost += r.cost;
    pos[best] = r.next;
    prevailing[best] = std::max(prevailing[best], model.grade(id, r.next));
    if (r.next == model.chain(id).target) {
      done[best] = true;
      res.fair_cost += prevailing[best];
      ++res.rewards;
    }
  }
  return res;
}

StrategyOutcome run_sequential(const GameModel& model, const std::vector<ChainId>& order, double grade_cap,
                               RandomSource& rng, const PlayOptions& options) {
  StrategyOutcome out;
  GameState state = GameState::initial(model.instance());
  detail::Player player(model, state, out, rng, options.record_trajectory);
  const int goal = model.instance().reward_target;
  for (int pass = 0; pass < 2 && out.rewards_collected < goal; ++pass) {
    const double cap = pass == 0 ? grade_cap : std::numeric_limits<double>::infinity();
    for (ChainId i : order) {
      if (out.rewards_collected >= goal) break;
      if (!state.available[static_cast<std::size_t>(i)]) continue;
      if (model.grade(i, player.position(i)) > cap + kLevelMergeTol) continue;
      player.move_to(i);
      while (state.available[static_cast<std::size_t>(i)] && model.grade(i, player.position(i)) <= cap + kLevelMergeTol) {
        if (out.total_cost > options.safety_cap) {
          out.truncated = true;
          return out;
        }
        player.play(i);
      }
    }
  }
  return out;
}

}  // namespace mg
