#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mg/markov_system.hpp"
#include "mg/random.hpp"

namespace mg {

/// Two-state chain {s, t}: playing s costs a and reaches t surely.
MarkovSystem delta_chain(double a);

/// Chain {s, v0, v1, t}: s costs c and moves to v1 with probability x and to
/// v0 otherwise; v0 costs 0 and v1 costs 1, both then reach t.
MarkovSystem mixture_chain(double x, double c);

/// Chain {s, x, t}: s costs 0 and reaches t with probability p, else x; x
/// costs `expensive` and reaches t.
MarkovSystem long_shot_chain(double p, double expensive);

/// Delta chain with cost a next to a mixture chain, all distances c, K = 1.
/// When a is not given it is set to (2 + x) c / (1 - x).
MetricInstance banks_sundaram_instance(double x, double c, std::optional<double> a = std::nullopt);

struct CounterexampleParams {
  double epsilon = 0.1;
  int chains_per_kind = 200;
  double expensive = 1e6;
};

/// Chains 0..n-1 succeed with probability epsilon/2 and sit on a path from
/// the root with hop lengths 1, 1/2, 1/4, ...; chains n..2n-1 succeed with
/// probability epsilon and sit at distance 1 from the root and each other.
/// Path chain j is as far from every first-kind chain as from the root.
/// Distances are the shortest-path closure of those edges. K = 1.
MetricInstance dtw_counterexample(const CounterexampleParams& params = {});

/// Delta chains with costs 1 and 5 and a mixture (x = 0.8, c = 0.01) on a
/// unit metric with K = 2.
MetricInstance paper_micro();

/// Builds a named scenario. Recognized names: banks_sundaram (x, c, a),
/// dtw_counterexample (epsilon, n, M), paper_micro.
struct ScenarioParams {
  double x = 0.8;
  double c = 0.01;
  std::optional<double> a;
  CounterexampleParams counterexample;
};
MetricInstance make_scenario(const std::string& name, const ScenarioParams& params = {});

enum class MetricKind { unit, random };

struct GeneratorParams {
  int chains = 3;
  int max_states = 4;
  double cost_min = 0.0;
  double cost_max = 1.0;
  MetricKind metric = MetricKind::unit;
  double unit_distance = 1.0;
  double max_edge = 2.0;
  int reward_target = 1;
};

/// Random chain with between 2 and max_states states, start 0 and target
/// last. Every non-target state keeps an edge to its successor so the target
/// is reachable from everywhere.
MarkovSystem gen_random_system(int max_states, double cost_min, double cost_max, RandomSource& rng);

/// Deterministic for fixed (params, seed); the result always validates.
MetricInstance gen_random_instance(const GeneratorParams& params, std::uint64_t seed);

/// All-pairs shortest paths over a symmetric weight matrix (in place).
void shortest_path_closure(Eigen::MatrixXd& weights);

}  // namespace mg
