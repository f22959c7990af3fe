#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mg/random.hpp"

namespace mg {

/// Index of a state inside one MarkovSystem.
using StateId = int;
/// Index of a chain inside a MetricInstance; kRoot denotes the root location.
using ChainId = int;
inline constexpr ChainId kRoot = -1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite Markov chain with per-state movement costs, a start state and an
/// absorbing target. Playing state u costs move_cost[u] and then moves the
/// token according to row u of the transition matrix.
struct MarkovSystem {
  std::vector<std::string> labels;
  Eigen::MatrixXd transition;
  Eigen::VectorXd move_cost;
  StateId start = 0;
  StateId target = 0;

  int size() const { return static_cast<int>(labels.size()); }
  bool valid_state(StateId u) const { return u >= 0 && u < size(); }
  const std::string& label(StateId u) const { return labels.at(static_cast<std::size_t>(u)); }
  /// Returns -1 when no state carries the label.
  StateId find(std::string_view label) const;
  std::vector<StateId> successors(StateId u) const;
};

/// Builds a system from labels; the costs/transition are taken as given.
MarkovSystem make_system(std::vector<std::string> labels, Eigen::MatrixXd transition,
                         Eigen::VectorXd move_cost, StateId start, StateId target);

/// Root plus chains embedded in a finite metric. distances is indexed by
/// node, where node 0 is the root and node i + 1 is chain i.
struct MetricInstance {
  std::vector<MarkovSystem> chains;
  Eigen::MatrixXd distances;
  int reward_target = 1;
  /// Initial token position per chain (defaults to each chain's start).
  std::vector<StateId> chain_positions;
  /// Initial availability per chain (defaults to true).
  std::vector<bool> available;

  int chain_count() const { return static_cast<int>(chains.size()); }
  double distance(ChainId from, ChainId to) const { return distances(from + 1, to + 1); }
  /// Fills chain_positions/available with defaults when they are empty.
  void reset_positions();
};

MetricInstance make_instance(std::vector<MarkovSystem> chains, Eigen::MatrixXd distances,
                             int reward_target);

/// All off-diagonal distances equal to `unit` over root plus n chains.
Eigen::MatrixXd unit_metric(int chain_count, double unit = 1.0);

struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool mentions(std::string_view needle) const;
  std::string summary() const;
  void merge(const ValidationReport& other, std::string_view prefix = {});
};

inline constexpr double kStochasticTol = 1e-12;
inline constexpr double kMetricTol = 1e-9;

ValidationReport validate_system(const MarkovSystem& system);
/// Metric axioms plus reward target and position consistency.
ValidationReport validate_metric(const MetricInstance& instance);
/// validate_system on every chain plus validate_metric.
ValidationReport validate_instance(const MetricInstance& instance);

/// Mutable play state of a game: where each token is, which chains can still
/// be played, and where the player stands.
struct GameState {
  std::vector<StateId> positions;
  std::vector<bool> available;
  ChainId location = kRoot;

  static GameState initial(const MetricInstance& instance);
  int available_count() const;
};

struct Segment {
  ChainId chain = kRoot;
  std::vector<StateId> states;
  std::vector<double> step_costs;
};

struct SwitchEvent {
  ChainId from = kRoot;
  ChainId to = kRoot;
  double paid = 0.0;
};

/// Visited states grouped into per-chain segments plus the switch events
/// between them.
struct Trajectory {
  std::vector<Segment> segments;
  std::vector<SwitchEvent> switches;

  void record_step(ChainId chain, StateId from, StateId to, double cost);
  void record_switch(ChainId from, ChainId to, double paid);
  double movement_cost() const;
  double switching_cost() const;
};

/// Checks that consecutive states have positive transition probability and
/// that recorded step costs equal the cost of the state being played.
ValidationReport check_trajectory(const MetricInstance& instance, const Trajectory& trajectory);

struct StepResult {
  StateId next = 0;
  double cost = 0.0;
};

/// Plays `state` once: the cost of `state` is charged, then the token moves.
StepResult step(const MarkovSystem& system, StateId state, RandomSource& rng);

struct SampledPath {
  Segment segment;
  double cost = 0.0;
};

class StepCapExceeded : public Error {
 public:
  StepCapExceeded(std::string what, SampledPath partial)
      : Error(std::move(what)), partial_(std::move(partial)) {}
  const SampledPath& partial() const { return partial_; }

 private:
  SampledPath partial_;
};

/// Plays from `from` until the target is reached. Throws StepCapExceeded
/// (carrying the partial path) when more than step_cap steps are needed.
SampledPath sample_to_target(const MarkovSystem& system, StateId from, RandomSource& rng,
                             long long step_cap = 10'000'000);

/// Adds, for every non-target state u, a dummy state u' with cost
/// `switch_cost` and a deterministic transition u' -> u. Original states keep
/// their ids; the dummy of u is dummy_state(system, u). The start of the
/// result is the dummy of the original start.
MarkovSystem build_dummy_system(const MarkovSystem& system, double switch_cost);
StateId dummy_state(const MarkovSystem& original, StateId u);

}  // namespace mg
