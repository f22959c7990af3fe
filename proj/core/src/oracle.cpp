#include "mg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mg {

namespace {

struct Successor {
  StateId state;
  double prob;
};

int finished_count(const MetricInstance& m, const std::vector<StateId>& positions) {
  int f = 0;
  for (int i = 0; i < m.chain_count(); ++i)
    f += positions[static_cast<std::size_t>(i)] == m.chains[static_cast<std::size_t>(i)].target ? 1 : 0;
  return f;
}

}  // namespace

std::size_t oracle_state_count(const MetricInstance& m) {
  std::size_t count = 1;
  for (const auto& c : m.chains) {
    const auto size = static_cast<std::size_t>(c.size());
    if (count > std::numeric_limits<std::size_t>::max() / (size * (m.chains.size() + 1)))
      return std::numeric_limits<std::size_t>::max();
    count *= size;
  }
  return count * static_cast<std::size_t>(std::max(1, m.chain_count())) + 1;
}

std::size_t OracleResult::encode(const std::vector<StateId>& positions, ChainId location) const {
  std::size_t p = 0;
  for (std::size_t i = 0; i < positions.size(); ++i) p += static_cast<std::size_t>(positions[i]) * stride_[i];
  return p * static_cast<std::size_t>(instance_->chain_count()) + static_cast<std::size_t>(location);
}

bool OracleResult::terminal(const JointState& s) const {
  return k_ - (finished_count(*instance_, s.positions) - finished_initially_) <= 0;
}

double OracleResult::action_value(const JointState& s, ChainId j) const {
  if (terminal(s)) throw Error("no action in a terminal state");
  if (j < 0 || j >= instance_->chain_count() || !playable_[static_cast<std::size_t>(j)])
    throw Error("illegal action: chain cannot be played");
  const auto& chain = instance_->chains[static_cast<std::size_t>(j)];
  const StateId u = s.positions[static_cast<std::size_t>(j)];
  if (u == chain.target) throw Error("illegal action: chain finished");
  double cost = (s.location == j ? 0.0 : instance_->distance(s.location, j)) + chain.move_cost(u);
  std::vector<StateId> next = s.positions;
  for (int v = 0; v < chain.size(); ++v) {
    const double p = chain.transition(u, v);
    if (p <= 0.0) continue;
    next[static_cast<std::size_t>(j)] = v;
    cost += p * values_[encode(next, j)];
  }
  return cost;
}

double OracleResult::value(const JointState& s) const {
  if (terminal(s)) return 0.0;
  if (s.location != kRoot) return values_[encode(s.positions, s.location)];
  double best = std::numeric_limits<double>::infinity();
  for (ChainId j = 0; j < instance_->chain_count(); ++j) {
    if (!playable_[static_cast<std::size_t>(j)]) continue;
    if (s.positions[static_cast<std::size_t>(j)] == instance_->chains[static_cast<std::size_t>(j)].target) continue;
    best = std::min(best, action_value(s, j));
  }
  return best;
}

ChainId OracleResult::action(const JointState& s) const {
  if (terminal(s)) return kRoot;
  if (s.location == kRoot) {
    if (s.positions == start_.positions && start_.location == kRoot) return root_action_;
    ChainId best = kRoot;
    double best_value = std::numeric_limits<double>::infinity();
    for (ChainId j = 0; j < instance_->chain_count(); ++j) {
      if (!playable_[static_cast<std::size_t>(j)]) continue;
      if (s.positions[static_cast<std::size_t>(j)] == instance_->chains[static_cast<std::size_t>(j)].target) continue;
      const double v = action_value(s, j);
      if (v < best_value) {
        best = j;
        best_value = v;
      }
    }
    return best;
  }
  return policy_[encode(s.positions, s.location)];
}

OracleResult solve_optimal(const MetricInstance& m, int k, ChainId start, const OracleOptions& options) {
  const int n = m.chain_count();
  if (n == 0) throw Error("instance has no chains");
  if (start != kRoot && (start < 0 || start >= n)) throw Error("invalid start location");

  OracleResult r;
  r.instance_ = &m;
  r.k_ = k;
  r.start_.location = start;
  r.start_.positions.resize(static_cast<std::size_t>(n));
  r.playable_.resize(static_cast<std::size_t>(n));
  int playable_count = 0;
  for (int i = 0; i < n; ++i) {
    const auto& c = m.chains[static_cast<std::size_t>(i)];
    const StateId p = m.chain_positions.empty() ? c.start : m.chain_positions[static_cast<std::size_t>(i)];
    r.start_.positions[static_cast<std::size_t>(i)] = p;
    const bool avail = m.available.empty() ? true : m.available[static_cast<std::size_t>(i)];
    r.playable_[static_cast<std::size_t>(i)] = avail && p != c.target;
    playable_count += r.playable_[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  if (k < 1 || k > playable_count) throw Error("infeasible reward target");
  r.finished_initially_ = finished_count(m, r.start_.positions);
  r.start_.rewards_remaining = k;

  r.state_count = oracle_state_count(m);
  if (r.state_count > options.state_cap) throw Error("instance too large for oracle");

  r.stride_.resize(static_cast<std::size_t>(n));
  std::size_t stride = 1;
  for (int i = 0; i < n; ++i) {
    r.stride_[static_cast<std::size_t>(i)] = stride;
    stride *= static_cast<std::size_t>(m.chains[static_cast<std::size_t>(i)].size());
  }
  r.position_count_ = stride;

  std::vector<std::vector<std::vector<Successor>>> succ(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& c = m.chains[static_cast<std::size_t>(i)];
    auto& table = succ[static_cast<std::size_t>(i)];
    table.resize(static_cast<std::size_t>(c.size()));
    for (int u = 0; u < c.size(); ++u)
      for (int v = 0; v < c.size(); ++v)
        if (c.transition(u, v) > 0.0) table[static_cast<std::size_t>(u)].push_back({v, c.transition(u, v)});
  }

  // Rewards still needed for every position combination.
  std::vector<int> remaining(r.position_count_);
  {
    std::vector<StateId> pos(static_cast<std::size_t>(n), 0);
    for (std::size_t p = 0; p < r.position_count_; ++p) {
      remaining[p] = k - (finished_count(m, pos) - r.finished_initially_);
      for (int i = 0; i < n; ++i) {
        auto& d = pos[static_cast<std::size_t>(i)];
        if (++d < m.chains[static_cast<std::size_t>(i)].size()) break;
        d = 0;
      }
    }
  }

  const auto nn = static_cast<std::size_t>(n);
  r.values_.assign(r.position_count_ * nn, 0.0);
  r.policy_.assign(r.position_count_ * nn, kRoot);

  std::vector<StateId> pos(nn, 0);
  for (r.sweeps = 0; r.sweeps < options.max_sweeps;) {
    ++r.sweeps;
    double delta = 0.0;
    std::fill(pos.begin(), pos.end(), 0);
    for (std::size_t p = 0; p < r.position_count_; ++p) {
      if (remaining[p] > 0) {
        for (int loc = 0; loc < n; ++loc) {
          double best = std::numeric_limits<double>::infinity();
          int best_action = kRoot;
          for (int a = 0; a < n; ++a) {
            // Try the active chain first so ties keep the player in place.
            const int j = a == 0 ? loc : (a <= loc ? a - 1 : a);
            if (!r.playable_[static_cast<std::size_t>(j)]) continue;
            const auto& c = m.chains[static_cast<std::size_t>(j)];
            const StateId u = pos[static_cast<std::size_t>(j)];
            if (u == c.target) continue;
            double q = (j == loc ? 0.0 : m.distance(loc, j)) + c.move_cost(u);
            const std::size_t base = p - static_cast<std::size_t>(u) * r.stride_[static_cast<std::size_t>(j)];
            for (const auto& s : succ[static_cast<std::size_t>(j)][static_cast<std::size_t>(u)])
              q += s.prob * r.values_[(base + static_cast<std::size_t>(s.state) * r.stride_[static_cast<std::size_t>(j)]) * nn +
                                      static_cast<std::size_t>(j)];
            if (q < best) {
              best = q;
              best_action = j;
            }
          }
          auto& v = r.values_[p * nn + static_cast<std::size_t>(loc)];
          delta = std::max(delta, std::abs(best - v));
          v = best;
          r.policy_[p * nn + static_cast<std::size_t>(loc)] = best_action;
        }
      }
      for (int i = 0; i < n; ++i) {
        auto& d = pos[static_cast<std::size_t>(i)];
        if (++d < m.chains[static_cast<std::size_t>(i)].size()) break;
        d = 0;
      }
    }
    r.residual = delta;
    if (delta < options.tol) {
      r.converged = true;
      break;
    }
  }

  if (start == kRoot) {
    double best = std::numeric_limits<double>::infinity();
    for (ChainId j = 0; j < n; ++j) {
      if (!r.playable_[static_cast<std::size_t>(j)]) continue;
      const double v = r.action_value(r.start_, j);
      if (v < best) {
        best = v;
        r.root_action_ = j;
      }
    }
    r.optimal_expected_cost = best;
  } else {
    r.optimal_expected_cost = r.value(r.start_);
  }
  return r;
}

double action_value(const MetricInstance& instance, int k, ChainId start, ChainId first_chain,
                    const OracleOptions& options) {
  const OracleResult r = solve_optimal(instance, k, start, options);
  return r.action_value(r.start(), first_chain);
}

PolicyEstimate simulate_policy(const OracleResult& result, const MetricInstance& instance, RandomSource& rng,
                               long long trials) {
  if (trials < 1) throw Error("trials must be positive");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (long long t = 0; t < trials; ++t) {
    JointState s = result.start();
    double cost = 0.0;
    long long steps = 0;
    while (!result.terminal(s)) {
      const ChainId j = result.action(s);
      if (j == kRoot) throw Error("policy undefined at a reachable state");
      if (++steps > 100'000'000) throw Error("policy rollout did not terminate");
      if (s.location != j) cost += instance.distance(s.location, j);
      s.location = j;
      const auto& chain = instance.chains[static_cast<std::size_t>(j)];
      const StepResult r = step(chain, s.positions[static_cast<std::size_t>(j)], rng);
      cost += r.cost;
      s.positions[static_cast<std::size_t>(j)] = r.next;
    }
    sum += cost;
    sum_sq += cost * cost;
  }
  PolicyEstimate e;
  e.trials = trials;
  e.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var = std::max(0.0, (sum_sq - sum * e.mean) / static_cast<double>(trials - 1));
    e.standard_error = std::sqrt(var / static_cast<double>(trials));
  }
  return e;
}

double banks_sundaram_mu(double x, double c) { return (2.0 + x) * c / (1.0 - x); }
double banks_sundaram_nu(double x, double c) { return x * c / (1.0 - x); }

BanksSundaramReport banks_sundaram_witness(double x, double y, double c) {
  if (!(y > 0.0 && y <= x && x < 1.0)) throw Error("constraint violated: 0 < y <= x < 1");
  if (!(c > 0.0)) throw Error("constraint violated: c > 0");
  if (!(3.0 * c <= 1.0 - x + 1e-12)) throw Error("constraint violated: 3c <= 1 - x");
  if (!(2.0 * x <= 1.0 + 2.0 * y + 1e-12)) throw Error("constraint violated: 2x <= 1 + 2y");
  BanksSundaramReport r;
  r.x = x;
  r.y = y;
  r.c = c;
  r.mu = banks_sundaram_mu(x, c);
  r.nu = banks_sundaram_nu(x, c);
  r.active_index = c / (1.0 - x);
  r.inactive_index = banks_sundaram_mu(y, c);
  r.contradiction = r.active_index > r.inactive_index;
  return r;
}

}  // namespace mg
