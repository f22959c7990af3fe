#include "mg/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mg/instance_io.hpp"
#include "mg/oracle.hpp"
#include "mg/strategy.hpp"

#ifndef MG_VERSION
#define MG_VERSION "unknown"
#endif

namespace mg {

using nlohmann::ordered_json;

namespace {

constexpr double kPaperMetricStart = 50000.0;

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

double number_or_inf(const ordered_json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

ordered_json config_json(const ExperimentConfig& c) {
  ordered_json j;
  j["strategy"] = c.strategy;
  j["profile"] = c.profile;
  j["beta"] = c.beta;
  j["c"] = c.c ? ordered_json(*c.c) : ordered_json(nullptr);
  j["alpha"] = c.alpha;
  j["tol"] = c.tol;
  j["max_phases"] = c.max_phases;
  j["safety_cap"] = number_or_null(c.safety_cap);
  j["budget"] = c.budget;
  j["fair_budget"] = number_or_null(c.fair_budget);
  j["grade_cap"] = number_or_null(c.grade_cap);
  j["dummy_switch_cost"] = c.dummy_switch_cost;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["run_oracle"] = c.run_oracle;
  j["oracle_state_cap"] = c.oracle_state_cap;
  j["instance_source"] = c.instance_source;
  return j;
}

ExperimentConfig config_from_json(const ordered_json& j) {
  ExperimentConfig c;
  c.strategy = j.at("strategy").get<std::string>();
  c.profile = j.at("profile").get<std::string>();
  c.beta = j.at("beta").get<double>();
  if (!j.at("c").is_null()) c.c = j.at("c").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.tol = j.at("tol").get<double>();
  c.max_phases = j.at("max_phases").get<int>();
  c.safety_cap = number_or_inf(j.at("safety_cap"));
  c.budget = j.at("budget").get<double>();
  c.fair_budget = number_or_inf(j.at("fair_budget"));
  c.grade_cap = number_or_inf(j.at("grade_cap"));
  c.dummy_switch_cost = j.at("dummy_switch_cost").get<double>();
  c.trials = j.at("trials").get<long long>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.run_oracle = j.at("run_oracle").get<bool>();
  c.oracle_state_cap = j.at("oracle_state_cap").get<std::size_t>();
  c.instance_source = j.at("instance_source").get<std::string>();
  return c;
}

ordered_json quantiles_json(const CostQuantiles& q) { return {{"q10", q.q10}, {"q50", q.q50}, {"q90", q.q90}}; }

CostQuantiles quantiles_from_json(const ordered_json& j) {
  return {j.at("q10").get<double>(), j.at("q50").get<double>(), j.at("q90").get<double>()};
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

CostQuantiles quantiles(const std::vector<double>& v) { return {quantile(v, 0.1), quantile(v, 0.5), quantile(v, 0.9)}; }

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

TrialDigest digest_of(long long trial, const StrategyOutcome& o, bool success) {
  TrialDigest d;
  d.trial = trial;
  d.rewards = o.rewards_collected;
  d.movement = o.movement_cost;
  d.switching = o.switching_cost;
  d.total = o.total_cost;
  d.truncated = o.truncated;
  d.success = success;
  d.phases = static_cast<int>(o.phase_log.size());
  return d;
}

std::vector<ChainId> available_chains(const GameState& state) {
  std::vector<ChainId> ids;
  for (std::size_t i = 0; i < state.available.size(); ++i)
    if (state.available[i]) ids.push_back(static_cast<ChainId>(i));
  return ids;
}

TrialDigest run_trial(const GameModel& model, const ExperimentConfig& cfg, const OrderingSolver& solver,
                      long long trial) {
  RandomSource rng(cfg.seed, static_cast<std::uint64_t>(trial));
  PlayOptions opts;
  opts.safety_cap = cfg.safety_cap;
  const int k = model.instance().reward_target;
  DoublingParams dp;
  dp.beta = cfg.beta;
  dp.c = cfg.doubling_c();
  dp.max_phases = cfg.max_phases;

  const std::string& s = cfg.strategy;
  if (s == "index") {
    const StrategyOutcome o = run_index_strategy(model, rng, opts);
    return digest_of(trial, o, !o.truncated && o.rewards_collected >= k);
  }
  if (s == "doubling-unit") {
    const StrategyOutcome o = run_doubling_unit(model, dp, rng, opts);
    return digest_of(trial, o, !o.truncated && o.rewards_collected >= k);
  }
  if (s == "doubling-metric") {
    const StrategyOutcome o = run_doubling_metric(model, dp, cfg.alpha, solver, rng, opts);
    return digest_of(trial, o, !o.truncated && o.rewards_collected >= k);
  }
  if (s == "budget-unit") {
    GameState state = GameState::initial(model.instance());
    const BudgetResult r = run_budget_mg_unit(model, state, k, cfg.budget, rng, opts);
    return digest_of(trial, r.outcome, r.remaining_k == 0);
  }
  if (s == "budget-metric") {
    GameState state = GameState::initial(model.instance());
    const BudgetMetricResult r = run_budget_mg_metric(model, state, k, cfg.budget, cfg.alpha, solver, rng, opts);
    return digest_of(trial, r.outcome, r.remaining_k == 0);
  }
  if (s == "fair-greedy") {
    const GameState state = GameState::initial(model.instance());
    const FairGreedyResult r = run_fair_greedy(model, available_chains(state), k, cfg.fair_budget, rng);
    TrialDigest d;
    d.trial = trial;
    d.rewards = r.rewards;
    d.movement = r.movement_cost;
    d.total = r.movement_cost;
    d.success = r.rewards >= k;
    return d;
  }
  if (s == "sequential") {
    const GameState state = GameState::initial(model.instance());
    const StrategyOutcome o = run_sequential(model, available_chains(state), cfg.grade_cap, rng, opts);
    return digest_of(trial, o, !o.truncated && o.rewards_collected >= k);
  }
  throw Error("unknown strategy: " + s);
}

void solve_oracle(const ExperimentConfig& cfg, const MetricInstance& instance, std::optional<double>& value,
                  std::string& status) {
  if (!cfg.run_oracle) {
    status = "disabled";
    return;
  }
  const std::size_t count = oracle_state_count(instance);
  if (count > cfg.oracle_state_cap) {
    status = "skipped: instance too large for oracle";
    return;
  }
  try {
    OracleOptions opts;
    opts.state_cap = cfg.oracle_state_cap;
    value = solve_optimal(instance, instance.reward_target, kRoot, opts).optimal_expected_cost;
    status = "ok";
  } catch (const Error& e) {
    status = std::string("skipped: ") + e.what();
  }
}

std::optional<double> ratio_of(double mean, const std::optional<double>& oracle) {
  if (!oracle) return std::nullopt;
  if (*oracle > 0.0) return mean / *oracle;
  if (mean == 0.0) return 1.0;
  return std::nullopt;
}

}  // namespace

std::string library_version() { return MG_VERSION; }

void ExperimentConfig::validate() const {
  if (std::find(strategy_ids().begin(), strategy_ids().end(), strategy) == strategy_ids().end())
    throw Error("unknown strategy: " + strategy);
  if (profile != "experiment" && profile != "paper") throw Error("unknown profile: " + profile);
  if (!(beta > 1.0 && beta < 2.0)) throw Error("beta must lie in (1, 2)");
  if (c && !(*c > 0.0)) throw Error("c must be positive");
  if (!(alpha > 0.0)) throw Error("alpha must be positive");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_phases < 1) throw Error("max_phases must be positive");
  if (!(safety_cap > 0.0)) throw Error("safety_cap must be positive");
  if (!(budget > 0.0)) throw Error("budget must be positive");
  if (!(fair_budget > 0.0)) throw Error("fair_budget must be positive");
  if (!(grade_cap >= 0.0)) throw Error("grade_cap must be nonnegative");
  if (!(dummy_switch_cost > 0.0)) throw Error("dummy switch cost must be positive");
  if (trials < 1) throw Error("trials must be at least 1");
  if (threads < 0) throw Error("threads must be nonnegative");
}

double ExperimentConfig::doubling_c() const {
  if (c) return *c;
  if (profile == "paper" && strategy == "doubling-metric") return kPaperMetricStart;
  return 1.0;
}

Aggregate aggregate(const std::vector<TrialDigest>& digests) {
  Aggregate a;
  a.trials = static_cast<long long>(digests.size());
  if (digests.empty()) return a;
  std::vector<double> total, movement, switching;
  double sum = 0.0, sum_move = 0.0, sum_switch = 0.0;
  long long successes = 0;
  for (const auto& d : digests) {
    total.push_back(d.total);
    movement.push_back(d.movement);
    switching.push_back(d.switching);
    sum += d.total;
    sum_move += d.movement;
    sum_switch += d.switching;
    successes += d.success ? 1 : 0;
    a.truncated += d.truncated ? 1 : 0;
  }
  const double n = static_cast<double>(digests.size());
  a.mean_total = sum / n;
  a.mean_movement = sum_move / n;
  a.mean_switching = sum_switch / n;
  if (digests.size() > 1) {
    double ss = 0.0;
    for (const double t : total) ss += (t - a.mean_total) * (t - a.mean_total);
    a.stderr_total = std::sqrt(ss / (n - 1.0) / n);
  }
  a.total = quantiles(total);
  a.movement = quantiles(movement);
  a.switching = quantiles(switching);
  a.success_rate = static_cast<double>(successes) / n;
  return a;
}

Report run_experiment(const ExperimentConfig& config, const MetricInstance& instance) {
  config.validate();
  const ValidationReport check = validate_instance(instance);
  if (!check.ok()) throw InstanceValidationError(check);

  const GameModel model(instance, config.dummy_switch_cost, config.tol);
  const GreedyEffectiveCostOrdering solver;

  Report report;
  report.config = config;
  report.version = library_version();
  report.trials.resize(static_cast<std::size_t>(config.trials));

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::min<long long>(config.trials, 1024))));
  std::atomic<long long> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (long long t = next++; t < config.trials; t = next++) {
      try {
        report.trials[static_cast<std::size_t>(t)] = run_trial(model, config, solver, t);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  report.summary = aggregate(report.trials);
  solve_oracle(config, instance, report.oracle_value, report.oracle_status);
  report.ratio = ratio_of(report.summary.mean_total, report.oracle_value);
  report.run_id = fnv1a_hex(config_json(config).dump() + "\n" + serialize_instance(instance));
  report.timestamp = utc_timestamp();
  return report;
}

std::string serialize_report(const Report& r, bool include_timestamp) {
  std::string out;
  for (const auto& d : r.trials) {
    ordered_json j;
    j["type"] = "trial";
    j["run_id"] = r.run_id;
    j["trial"] = d.trial;
    j["rewards"] = d.rewards;
    j["movement"] = d.movement;
    j["switching"] = d.switching;
    j["total"] = d.total;
    j["truncated"] = d.truncated;
    j["success"] = d.success;
    j["phases"] = d.phases;
    out += j.dump();
    out += '\n';
  }
  const Aggregate& a = r.summary;
  ordered_json s;
  s["type"] = "summary";
  s["run_id"] = r.run_id;
  s["trials"] = a.trials;
  s["mean_total"] = a.mean_total;
  s["stderr_total"] = a.stderr_total;
  s["mean_movement"] = a.mean_movement;
  s["mean_switching"] = a.mean_switching;
  s["quantiles_total"] = quantiles_json(a.total);
  s["quantiles_movement"] = quantiles_json(a.movement);
  s["quantiles_switching"] = quantiles_json(a.switching);
  s["success_rate"] = a.success_rate;
  s["truncated"] = a.truncated;
  s["oracle_status"] = r.oracle_status;
  s["oracle_value"] = r.oracle_value ? ordered_json(*r.oracle_value) : ordered_json(nullptr);
  s["ratio"] = r.ratio ? ordered_json(*r.ratio) : ordered_json(nullptr);
  s["config"] = config_json(r.config);
  s["version"] = r.version;
  if (include_timestamp) s["timestamp"] = r.timestamp;
  out += s.dump();
  out += '\n';
  return out;
}

std::vector<Report> parse_reports(std::string_view text) {
  std::vector<Report> reports;
  Report current;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (type == "trial") {
        TrialDigest d;
        d.trial = j.at("trial").get<long long>();
        d.rewards = j.at("rewards").get<int>();
        d.movement = j.at("movement").get<double>();
        d.switching = j.at("switching").get<double>();
        d.total = j.at("total").get<double>();
        d.truncated = j.at("truncated").get<bool>();
        d.success = j.at("success").get<bool>();
        d.phases = j.at("phases").get<int>();
        current.run_id = j.at("run_id").get<std::string>();
        current.trials.push_back(d);
      } else if (type == "summary") {
        current.run_id = j.at("run_id").get<std::string>();
        Aggregate& a = current.summary;
        a.trials = j.at("trials").get<long long>();
        a.mean_total = j.at("mean_total").get<double>();
        a.stderr_total = j.at("stderr_total").get<double>();
        a.mean_movement = j.at("mean_movement").get<double>();
        a.mean_switching = j.at("mean_switching").get<double>();
        a.total = quantiles_from_json(j.at("quantiles_total"));
        a.movement = quantiles_from_json(j.at("quantiles_movement"));
        a.switching = quantiles_from_json(j.at("quantiles_switching"));
        a.success_rate = j.at("success_rate").get<double>();
        a.truncated = j.at("truncated").get<long long>();
        current.oracle_status = j.at("oracle_status").get<std::string>();
        if (!j.at("oracle_value").is_null()) current.oracle_value = j.at("oracle_value").get<double>();
        if (!j.at("ratio").is_null()) current.ratio = j.at("ratio").get<double>();
        current.config = config_from_json(j.at("config"));
        current.version = j.at("version").get<std::string>();
        if (j.contains("timestamp")) current.timestamp = j.at("timestamp").get<std::string>();
        reports.push_back(std::move(current));
        current = Report{};
      } else {
        throw Error("unknown record type '" + type + "'");
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("report line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError("report line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!current.trials.empty()) throw ParseError("report ends without a summary record");
  return reports;
}

std::string append_report(Report report, const std::filesystem::path& path) {
  std::size_t existing = 0;
  if (std::filesystem::exists(path)) existing = parse_reports(read_text_file(path)).size();
  const std::string base = report.run_id.substr(0, report.run_id.find('-'));
  report.run_id = base + "-" + std::to_string(existing + 1);
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot open report file: " + path.string());
  out << serialize_report(report);
  if (!out) throw Error("failed writing report file: " + path.string());
  return report.run_id;
}

Comparison compare_strategies(const std::vector<ExperimentConfig>& configs, const MetricInstance& instance) {
  if (configs.size() < 2) throw Error("compare needs at least two strategies");
  Comparison cmp;
  solve_oracle(configs.front(), instance, cmp.oracle_value, cmp.oracle_status);
  for (ExperimentConfig cfg : configs) {
    cfg.run_oracle = false;
    const Report r = run_experiment(cfg, instance);
    ComparisonRow row;
    row.strategy = cfg.strategy;
    row.success_rate = r.summary.success_rate;
    row.mean_total = r.summary.mean_total;
    row.stderr_total = r.summary.stderr_total;
    row.mean_movement = r.summary.mean_movement;
    row.mean_switching = r.summary.mean_switching;
    row.ratio = ratio_of(row.mean_total, cmp.oracle_value);
    cmp.rows.push_back(row);
  }
  return cmp;
}

std::string serialize_comparison(const Comparison& cmp) {
  ordered_json j;
  j["oracle_status"] = cmp.oracle_status;
  j["oracle_value"] = cmp.oracle_value ? ordered_json(*cmp.oracle_value) : ordered_json(nullptr);
  ordered_json rows = ordered_json::array();
  for (const auto& r : cmp.rows) {
    ordered_json row;
    row["strategy"] = r.strategy;
    row["success_rate"] = r.success_rate;
    row["mean_total"] = r.mean_total;
    row["stderr_total"] = r.stderr_total;
    row["mean_movement"] = r.mean_movement;
    row["mean_switching"] = r.mean_switching;
    row["ratio"] = r.ratio ? ordered_json(*r.ratio) : ordered_json(nullptr);
    rows.push_back(row);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace mg
