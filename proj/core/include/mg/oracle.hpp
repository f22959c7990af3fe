#pragma once

#include <cstddef>
#include <vector>

#include "mg/markov_system.hpp"
#include "mg/random.hpp"

namespace mg {

struct OracleOptions {
  double tol = 1e-10;
  std::size_t state_cap = 2'000'000;
  long long max_sweeps = 2'000'000;
};

/// Joint state of the multi-chain game: every token position plus the chain
/// the player stands on (kRoot before the first move).
struct JointState {
  std::vector<StateId> positions;
  ChainId location = kRoot;
  int rewards_remaining = 0;
};

/// Optimal value and policy of the joint game, computed by Gauss-Seidel
/// value iteration on the stochastic-shortest-path formulation. An action
/// is "play chain j": it pays the switch distance when j is not the current
/// location, then the cost of j's current state.
class OracleResult {
 public:
  double optimal_expected_cost = 0.0;
  std::size_t state_count = 0;
  double residual = 0.0;
  long long sweeps = 0;
  bool converged = false;

  /// Joint state the solve started from.
  const JointState& start() const { return start_; }
  /// Optimal expected remaining cost from a joint state.
  double value(const JointState& s) const;
  /// Chain played by the optimal policy; kRoot for terminal states.
  ChainId action(const JointState& s) const;
  bool terminal(const JointState& s) const;
  /// Expected total cost of playing `chain` now and acting optimally after.
  double action_value(const JointState& s, ChainId chain) const;

 private:
  friend OracleResult solve_optimal(const MetricInstance&, int, ChainId, const OracleOptions&);

  std::size_t encode(const std::vector<StateId>& positions, ChainId location) const;

  const MetricInstance* instance_ = nullptr;
  int k_ = 0;
  std::vector<bool> playable_;
  int finished_initially_ = 0;
  std::vector<std::size_t> stride_;
  std::size_t position_count_ = 0;
  std::vector<double> values_;
  std::vector<int> policy_;
  JointState start_;
  ChainId root_action_ = kRoot;
};

/// Number of joint states the oracle would enumerate.
std::size_t oracle_state_count(const MetricInstance& instance);

/// Solves the joint game for reward target k starting at `start` (kRoot or
/// active on a chain). The instance must outlive the result. Throws when the
/// state space exceeds options.state_cap or k is infeasible.
OracleResult solve_optimal(const MetricInstance& instance, int k, ChainId start = kRoot,
                           const OracleOptions& options = {});

/// Expected cost of taking `first_chain` first, then acting optimally.
double action_value(const MetricInstance& instance, int k, ChainId start, ChainId first_chain,
                    const OracleOptions& options = {});

struct PolicyEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  long long trials = 0;
};

/// Monte Carlo rollouts of the optimal policy from the result's start.
PolicyEstimate simulate_policy(const OracleResult& result, const MetricInstance& instance, RandomSource& rng,
                               long long trials);

/// Closed forms for the two-system switching-cost game built from a point
/// mass chain and a two-outcome mixture chain.
struct BanksSundaramReport {
  double x = 0.0;
  double y = 0.0;
  double c = 0.0;
  double mu = 0.0;               // (2 + x) c / (1 - x)
  double nu = 0.0;               // x c / (1 - x)
  double active_index = 0.0;     // c / (1 - x)
  double inactive_index = 0.0;   // mu(y, c)
  bool contradiction = false;    // active_index > inactive_index
};

double banks_sundaram_mu(double x, double c);
double banks_sundaram_nu(double x, double c);

/// Requires 0 < y <= x < 1, c > 0, 3c <= 1 - x and 2x <= 1 + 2y.
BanksSundaramReport banks_sundaram_witness(double x, double y, double c);

}  // namespace mg
