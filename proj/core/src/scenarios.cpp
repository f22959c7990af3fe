#include "mg/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mg {

MarkovSystem delta_chain(double a) {
  Eigen::MatrixXd p(2, 2);
  p << 0, 1, 0, 1;
  Eigen::VectorXd cost(2);
  cost << a, 0;
  return make_system({"s", "t"}, p, cost, 0, 1);
}

MarkovSystem mixture_chain(double x, double c) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 4);
  p(0, 1) = 1.0 - x;
  p(0, 2) = x;
  p(1, 3) = 1.0;
  p(2, 3) = 1.0;
  p(3, 3) = 1.0;
  Eigen::VectorXd cost(4);
  cost << c, 0, 1, 0;
  return make_system({"s", "v0", "v1", "t"}, p, cost, 0, 3);
}

MarkovSystem long_shot_chain(double p_success, double expensive) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 3);
  p(0, 2) = p_success;
  p(0, 1) = 1.0 - p_success;
  p(1, 2) = 1.0;
  p(2, 2) = 1.0;
  Eigen::VectorXd cost(3);
  cost << 0, expensive, 0;
  return make_system({"s", "x", "t"}, p, cost, 0, 2);
}

MetricInstance banks_sundaram_instance(double x, double c, std::optional<double> a) {
  if (!(x > 0.0 && x < 1.0)) throw Error("banks_sundaram: x must lie in (0, 1)");
  if (!(c > 0.0)) throw Error("banks_sundaram: c must be positive");
  const double cost = a.value_or((2.0 + x) * c / (1.0 - x));
  if (!(cost >= 0.0)) throw Error("banks_sundaram: a must be nonnegative");
  return make_instance({delta_chain(cost), mixture_chain(x, c)}, unit_metric(2, c), 1);
}

void shortest_path_closure(Eigen::MatrixXd& w) {
  const Eigen::Index n = w.rows();
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) w(i, j) = std::min(w(i, j), w(i, k) + w(k, j));
}

MetricInstance dtw_counterexample(const CounterexampleParams& params) {
  const double eps = params.epsilon;
  const int n = params.chains_per_kind;
  if (!(eps > 0.0 && eps < 1.0)) throw Error("dtw_counterexample: epsilon must lie in (0, 1)");
  if (n < 1) throw Error("dtw_counterexample: need at least one chain per kind");
  if (!(params.expensive > 0.0)) throw Error("dtw_counterexample: M must be positive");

  std::vector<MarkovSystem> chains;
  chains.reserve(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) chains.push_back(long_shot_chain(eps / 2.0, params.expensive));
  for (int i = 0; i < n; ++i) chains.push_back(long_shot_chain(eps, params.expensive));

  const double inf = std::numeric_limits<double>::infinity();
  const int nodes = 2 * n + 1;
  Eigen::MatrixXd w = Eigen::MatrixXd::Constant(nodes, nodes, inf);
  w.diagonal().setZero();
  auto edge = [&](int a, int b, double len) {
    w(a, b) = std::min(w(a, b), len);
    w(b, a) = std::min(w(b, a), len);
  };
  // Path root - S'_1 - S'_2 - ... with hop lengths 1, 1/2, 1/4, ...
  for (int j = 0; j < n; ++j) edge(j, j + 1, std::ldexp(1.0, -j));
  // First-kind chains sit at distance 1 from the root and from each other;
  // the j-th path chain is as far from each of them as from the root.
  double depth = 0.0;
  for (int j = 0; j < n; ++j) {
    depth += std::ldexp(1.0, -j);
    for (int k = 0; k < n; ++k) edge(j + 1, n + 1 + k, depth);
  }
  for (int k = 0; k < n; ++k) {
    edge(0, n + 1 + k, 1.0);
    for (int other = k + 1; other < n; ++other) edge(n + 1 + k, n + 1 + other, 1.0);
  }
  shortest_path_closure(w);
  return make_instance(std::move(chains), w, 1);
}

MetricInstance paper_micro() {
  return make_instance({delta_chain(1.0), delta_chain(5.0), mixture_chain(0.8, 0.01)}, unit_metric(3), 2);
}

MetricInstance make_scenario(const std::string& name, const ScenarioParams& params) {
  if (name == "banks_sundaram") return banks_sundaram_instance(params.x, params.c, params.a);
  if (name == "dtw_counterexample") return dtw_counterexample(params.counterexample);
  if (name == "paper_micro") return paper_micro();
  throw Error("unknown scenario: " + name);
}

MarkovSystem gen_random_system(int max_states, double cost_min, double cost_max, RandomSource& rng) {
  if (max_states < 2) throw Error("max_states must be at least 2");
  if (!(cost_min >= 0.0 && cost_max >= cost_min)) throw Error("invalid cost range");
  const int m = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_states - 1)));
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(m);
  std::vector<std::string> labels;
  for (int u = 0; u < m; ++u) labels.push_back(u == m - 1 ? "t" : "s" + std::to_string(u));
  for (int u = 0; u + 1 < m; ++u) {
    cost(u) = rng.uniform(cost_min, cost_max);
    double total = 0.0;
    for (int v = 0; v < m; ++v) {
      const bool forced = v == u + 1;
      if (forced || rng.bernoulli(0.5)) {
        p(u, v) = rng.uniform(0.05, 1.0);
        total += p(u, v);
      }
    }
    p.row(u) /= total;
  }
  p(m - 1, m - 1) = 1.0;
  return make_system(std::move(labels), p, cost, 0, m - 1);
}

MetricInstance gen_random_instance(const GeneratorParams& params, std::uint64_t seed) {
  if (params.chains < 1) throw Error("need at least one chain");
  if (params.reward_target < 1 || params.reward_target > params.chains) throw Error("reward target out of range");
  RandomSource rng(seed, 0);
  std::vector<MarkovSystem> chains;
  for (int i = 0; i < params.chains; ++i)
    chains.push_back(gen_random_system(params.max_states, params.cost_min, params.cost_max, rng));
  Eigen::MatrixXd d;
  if (params.metric == MetricKind::unit) {
    d = unit_metric(params.chains, params.unit_distance);
  } else {
    const int nodes = params.chains + 1;
    d = Eigen::MatrixXd::Zero(nodes, nodes);
    for (int i = 0; i < nodes; ++i)
      for (int j = i + 1; j < nodes; ++j) d(i, j) = d(j, i) = rng.uniform(0.0, params.max_edge);
    shortest_path_closure(d);
  }
  MetricInstance m = make_instance(std::move(chains), d, params.reward_target);
  const ValidationReport report = validate_instance(m);
  if (!report.ok()) throw Error("generator produced an invalid instance: " + report.summary());
  return m;
}

}  // namespace mg
