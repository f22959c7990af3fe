#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mg/markov_system.hpp"

namespace mg {

/// Strategy identifiers accepted by run_experiment.
inline const std::vector<std::string>& strategy_ids() {
  static const std::vector<std::string> ids{"index",           "doubling-unit", "budget-unit", "budget-metric",
                                            "doubling-metric", "fair-greedy",   "sequential"};
  return ids;
}

struct ExperimentConfig {
  std::string strategy = "index";
  /// "experiment" (c = 1) or "paper" (metric doubling starts at 50000).
  std::string profile = "experiment";
  double beta = 1.5;
  std::optional<double> c;
  double alpha = 1.0;
  double tol = 1e-9;
  int max_phases = 200;
  double safety_cap = 1e12;
  /// Budget for the single-pass budget-unit / budget-metric strategies.
  double budget = 1.0;
  /// Budget for fair-greedy; infinite by default.
  double fair_budget = std::numeric_limits<double>::infinity();
  /// Grade cap of the sequential strategy's first pass.
  double grade_cap = 1.0;
  double dummy_switch_cost = 1.0;
  long long trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency
  bool run_oracle = true;
  std::size_t oracle_state_cap = 2'000'000;
  /// Free-form description of where the instance came from.
  std::string instance_source;

  /// Throws on invalid settings.
  void validate() const;
  /// Doubling start constant after applying the profile.
  double doubling_c() const;
};

struct TrialDigest {
  long long trial = 0;
  int rewards = 0;
  double movement = 0.0;
  double switching = 0.0;
  double total = 0.0;
  bool truncated = false;
  bool success = false;
  int phases = 0;
};

struct CostQuantiles {
  double q10 = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
};

struct Aggregate {
  long long trials = 0;
  double mean_total = 0.0;
  double stderr_total = 0.0;
  double mean_movement = 0.0;
  double mean_switching = 0.0;
  CostQuantiles total;
  CostQuantiles movement;
  CostQuantiles switching;
  double success_rate = 0.0;
  long long truncated = 0;
};

Aggregate aggregate(const std::vector<TrialDigest>& digests);

struct Report {
  std::string run_id;
  ExperimentConfig config;
  std::vector<TrialDigest> trials;
  Aggregate summary;
  std::optional<double> oracle_value;
  std::string oracle_status;  // "ok", "skipped: ..." or "disabled"
  std::optional<double> ratio;
  std::string version;
  std::string timestamp;
};

/// Runs config.trials seeded trials of one strategy on the instance. Trial i
/// uses RandomSource(seed, i); results are assembled in trial order.
Report run_experiment(const ExperimentConfig& config, const MetricInstance& instance);

/// Line-delimited JSON: one record per trial, then one summary record. The
/// timestamp is written only when include_timestamp is set.
std::string serialize_report(const Report& report, bool include_timestamp = true);

/// Parses every run in a report file.
std::vector<Report> parse_reports(std::string_view text);

/// Appends the report to `path`, giving it a run id that is new in the file.
/// Returns the run id used.
std::string append_report(Report report, const std::filesystem::path& path);

struct ComparisonRow {
  std::string strategy;
  double success_rate = 0.0;
  double mean_total = 0.0;
  double stderr_total = 0.0;
  double mean_movement = 0.0;
  double mean_switching = 0.0;
  std::optional<double> ratio;
};

struct Comparison {
  std::optional<double> oracle_value;
  std::string oracle_status;
  std::vector<ComparisonRow> rows;
};

/// Runs every config on the same instance; the oracle is solved at most once.
Comparison compare_strategies(const std::vector<ExperimentConfig>& configs, const MetricInstance& instance);

std::string serialize_comparison(const Comparison& comparison);

std::string library_version();

}  // namespace mg
