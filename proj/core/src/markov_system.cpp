#include "mg/markov_system.hpp"

#include <cmath>
#include <deque>
#include <sstream>

namespace mg {

namespace {

std::string node_name(int node) {
  return node == 0 ? std::string("root") : "chain " + std::to_string(node - 1);
}

}  // namespace

StateId MarkovSystem::find(std::string_view label) const {
  for (int u = 0; u < size(); ++u)
    if (labels[static_cast<std::size_t>(u)] == label) return u;
  return -1;
}

std::vector<StateId> MarkovSystem::successors(StateId u) const {
  std::vector<StateId> out;
  for (int v = 0; v < size(); ++v)
    if (transition(u, v) > 0.0) out.push_back(v);
  return out;
}

MarkovSystem make_system(std::vector<std::string> labels, Eigen::MatrixXd transition,
                         Eigen::VectorXd move_cost, StateId start, StateId target) {
  MarkovSystem s;
  s.labels = std::move(labels);
  s.transition = std::move(transition);
  s.move_cost = std::move(move_cost);
  s.start = start;
  s.target = target;
  return s;
}

void MetricInstance::reset_positions() {
  if (chain_positions.empty()) {
    chain_positions.reserve(chains.size());
    for (const auto& c : chains) chain_positions.push_back(c.start);
  }
  if (available.empty()) available.assign(chains.size(), true);
}

MetricInstance make_instance(std::vector<MarkovSystem> chains, Eigen::MatrixXd distances,
                             int reward_target) {
  MetricInstance m;
  m.chains = std::move(chains);
  m.distances = std::move(distances);
  m.reward_target = reward_target;
  m.reset_positions();
  return m;
}

Eigen::MatrixXd unit_metric(int chain_count, double unit) {
  const int n = chain_count + 1;
  Eigen::MatrixXd d = Eigen::MatrixXd::Constant(n, n, unit);
  d.diagonal().setZero();
  return d;
}

bool ValidationReport::mentions(std::string_view needle) const {
  for (const auto& v : violations)
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

std::string ValidationReport::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i];
  }
  return os.str();
}

void ValidationReport::merge(const ValidationReport& other, std::string_view prefix) {
  for (const auto& v : other.violations)
    violations.push_back(prefix.empty() ? v : std::string(prefix) + ": " + v);
}

ValidationReport validate_system(const MarkovSystem& s) {
  ValidationReport r;
  const int n = s.size();
  if (n == 0) {
    r.violations.emplace_back("system has no states");
    return r;
  }
  if (s.transition.rows() != n || s.transition.cols() != n) {
    r.violations.emplace_back("transition matrix shape does not match state count");
    return r;
  }
  if (s.move_cost.size() != n) {
    r.violations.emplace_back("move_cost length does not match state count");
    return r;
  }
  if (!s.valid_state(s.start)) r.violations.emplace_back("start is not a state");
  if (!s.valid_state(s.target)) {
    r.violations.emplace_back("target is not a state");
    return r;
  }

  for (int u = 0; u < n; ++u) {
    const double c = s.move_cost(u);
    if (!std::isfinite(c)) r.violations.push_back("non-finite cost at " + s.label(u));
    else if (c < 0.0) r.violations.push_back("negative cost at " + s.label(u));
    double sum = 0.0;
    bool bad_entry = false;
    for (int v = 0; v < n; ++v) {
      const double p = s.transition(u, v);
      if (!std::isfinite(p) || p < 0.0) bad_entry = true;
      sum += p;
    }
    if (bad_entry) r.violations.push_back("invalid probability in row " + s.label(u));
    if (std::abs(sum - 1.0) > kStochasticTol) r.violations.push_back("row not stochastic at " + s.label(u));
  }

  const StateId t = s.target;
  if (std::abs(s.transition(t, t) - 1.0) > kStochasticTol) r.violations.emplace_back("target not absorbing");
  if (s.move_cost(t) != 0.0) r.violations.emplace_back("target cost must be zero");

  // Reverse reachability from the target over positive-probability edges.
  std::vector<bool> reaches(static_cast<std::size_t>(n), false);
  std::deque<int> queue{t};
  reaches[static_cast<std::size_t>(t)] = true;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u = 0; u < n; ++u) {
      if (!reaches[static_cast<std::size_t>(u)] && s.transition(u, v) > 0.0) {
        reaches[static_cast<std::size_t>(u)] = true;
        queue.push_back(u);
      }
    }
  }
  for (int u = 0; u < n; ++u)
    if (!reaches[static_cast<std::size_t>(u)]) r.violations.push_back("target unreachable from " + s.label(u));
  return r;
}

ValidationReport validate_metric(const MetricInstance& m) {
  ValidationReport r;
  const int n = m.chain_count() + 1;
  const auto& d = m.distances;
  if (d.rows() != n || d.cols() != n) {
    r.violations.push_back("distance matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    return r;
  }
  for (int a = 0; a < n; ++a) {
    if (d(a, a) != 0.0) r.violations.push_back("nonzero diagonal at " + node_name(a));
    for (int b = 0; b < n; ++b) {
      if (!std::isfinite(d(a, b)) || d(a, b) < 0.0)
        r.violations.push_back("negative or non-finite distance " + node_name(a) + "-" + node_name(b));
      if (b > a && std::abs(d(a, b) - d(b, a)) > kMetricTol)
        r.violations.push_back("asymmetric distance " + node_name(a) + "-" + node_name(b));
    }
  }
  bool triangle_reported = false;
  for (int a = 0; a < n && !triangle_reported; ++a)
    for (int b = 0; b < n && !triangle_reported; ++b)
      for (int c = 0; c < n; ++c) {
        if (d(a, c) > d(a, b) + d(b, c) + kMetricTol) {
          r.violations.push_back("triangle inequality violated at " + node_name(a) + ", " + node_name(b) +
                                 ", " + node_name(c));
          triangle_reported = true;
          break;
        }
      }

  if (m.reward_target < 1) r.violations.emplace_back("reward target must be positive");
  if (m.reward_target > m.chain_count()) r.violations.emplace_back("reward target exceeds chain count");
  if (!m.chain_positions.empty()) {
    if (static_cast<int>(m.chain_positions.size()) != m.chain_count())
      r.violations.emplace_back("chain_positions length does not match chain count");
    else
      for (int i = 0; i < m.chain_count(); ++i)
        if (!m.chains[static_cast<std::size_t>(i)].valid_state(m.chain_positions[static_cast<std::size_t>(i)]))
          r.violations.push_back("invalid position for chain " + std::to_string(i));
  }
  if (!m.available.empty() && static_cast<int>(m.available.size()) != m.chain_count())
    r.violations.emplace_back("available length does not match chain count");
  return r;
}

ValidationReport validate_instance(const MetricInstance& m) {
  ValidationReport r;
  for (int i = 0; i < m.chain_count(); ++i)
    r.merge(validate_system(m.chains[static_cast<std::size_t>(i)]), "chain " + std::to_string(i));
  r.merge(validate_metric(m));
  return r;
}

GameState GameState::initial(const MetricInstance& m) {
  GameState g;
  const auto n = static_cast<std::size_t>(m.chain_count());
  g.positions.resize(n);
  g.available.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& chain = m.chains[i];
    g.positions[i] = m.chain_positions.empty() ? chain.start : m.chain_positions[i];
    const bool flag = m.available.empty() ? true : m.available[i];
    g.available[i] = flag && g.positions[i] != chain.target;
  }
  return g;
}

int GameState::available_count() const {
  int k = 0;
  for (bool a : available) k += a ? 1 : 0;
  return k;
}

void Trajectory::record_step(ChainId chain, StateId from, StateId to, double cost) {
  if (segments.empty() || segments.back().chain != chain || segments.back().states.back() != from) {
    segments.push_back(Segment{chain, {from}, {}});
  }
  segments.back().states.push_back(to);
  segments.back().step_costs.push_back(cost);
}

void Trajectory::record_switch(ChainId from, ChainId to, double paid) {
  switches.push_back(SwitchEvent{from, to, paid});
}

double Trajectory::movement_cost() const {
  double total = 0.0;
  for (const auto& s : segments)
    for (double c : s.step_costs) total += c;
  return total;
}

double Trajectory::switching_cost() const {
  double total = 0.0;
  for (const auto& e : switches) total += e.paid;
  return total;
}

ValidationReport check_trajectory(const MetricInstance& m, const Trajectory& traj) {
  ValidationReport r;
  for (const auto& seg : traj.segments) {
    if (seg.chain < 0 || seg.chain >= m.chain_count()) {
      r.violations.emplace_back("segment on unknown chain");
      continue;
    }
    const auto& sys = m.chains[static_cast<std::size_t>(seg.chain)];
    if (seg.step_costs.size() + 1 != seg.states.size()) {
      r.violations.emplace_back("segment cost count mismatch");
      continue;
    }
    for (std::size_t k = 0; k + 1 < seg.states.size(); ++k) {
      const StateId u = seg.states[k];
      const StateId v = seg.states[k + 1];
      if (!(sys.transition(u, v) > 0.0))
        r.violations.push_back("zero-probability transition " + sys.label(u) + "->" + sys.label(v));
      if (seg.step_costs[k] != sys.move_cost(u))
        r.violations.push_back("step cost differs from cost of " + sys.label(u));
    }
  }
  for (const auto& e : traj.switches)
    if (std::abs(e.paid - m.distance(e.from, e.to)) > kMetricTol)
      r.violations.emplace_back("switch paid differs from distance");
  return r;
}

StepResult step(const MarkovSystem& system, StateId state, RandomSource& rng) {
  if (state == system.target) throw Error("target is absorbing");
  if (!system.valid_state(state)) throw Error("invalid state");
  const double u = rng.uniform();
  double acc = 0.0;
  StateId last = state;
  for (int v = 0; v < system.size(); ++v) {
    const double p = system.transition(state, v);
    if (p <= 0.0) continue;
    acc += p;
    last = v;
    if (u < acc) return StepResult{v, system.move_cost(state)};
  }
  return StepResult{last, system.move_cost(state)};
}

SampledPath sample_to_target(const MarkovSystem& system, StateId from, RandomSource& rng,
                             long long step_cap) {
  if (!system.valid_state(from)) throw Error("invalid state");
  SampledPath path;
  path.segment.states.push_back(from);
  StateId u = from;
  long long steps = 0;
  while (u != system.target) {
    if (steps >= step_cap) throw StepCapExceeded("step cap exceeded before reaching target", std::move(path));
    const StepResult r = step(system, u, rng);
    path.segment.states.push_back(r.next);
    path.segment.step_costs.push_back(r.cost);
    path.cost += r.cost;
    u = r.next;
    ++steps;
  }
  return path;
}

StateId dummy_state(const MarkovSystem& original, StateId u) {
  if (u == original.target) throw Error("target has no dummy state");
  return original.size() + (u < original.target ? u : u - 1);
}

MarkovSystem build_dummy_system(const MarkovSystem& system, double switch_cost) {
  if (switch_cost < 0.0) throw Error("switch cost must be nonnegative");
  const int n = system.size();
  const int total = 2 * n - 1;
  MarkovSystem out;
  out.labels = system.labels;
  out.labels.reserve(static_cast<std::size_t>(total));
  out.transition = Eigen::MatrixXd::Zero(total, total);
  out.transition.topLeftCorner(n, n) = system.transition;
  out.move_cost = Eigen::VectorXd::Zero(total);
  out.move_cost.head(n) = system.move_cost;
  for (int u = 0; u < n; ++u) {
    if (u == system.target) continue;
    const StateId d = dummy_state(system, u);
    out.labels.push_back(system.label(u) + "'");
    out.transition(d, u) = 1.0;
    out.move_cost(d) = switch_cost;
  }
  out.target = system.target;
  out.start = system.start == system.target ? system.target : dummy_state(system, system.start);
  return out;
}

}  // namespace mg
