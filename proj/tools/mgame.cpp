#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mg/experiment.hpp"
#include "mg/grade.hpp"
#include "mg/instance_io.hpp"
#include "mg/oracle.hpp"
#include "mg/scenarios.hpp"
#include "mg/selection_cost.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw mg::Error("cannot open output file: " + out_path);
  out << text;
}

void add_experiment_options(CLI::App* cmd, mg::ExperimentConfig& cfg, double& c_value) {
  cmd->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", cfg.seed, "Base seed");
  cmd->add_option("--beta", cfg.beta, "Doubling ratio in (1, 2)");
  cmd->add_option("--c", c_value, "Doubling start constant (overrides the profile)");
  cmd->add_option("--alpha", cfg.alpha, "Ordering approximation factor");
  cmd->add_option("--profile", cfg.profile, "Constant profile")->check(CLI::IsMember({"experiment", "paper"}));
  cmd->add_option("--budget", cfg.budget, "Budget of the single-pass budget strategies");
  cmd->add_option("--fair-budget", cfg.fair_budget, "Budget of the fair-greedy strategy");
  cmd->add_option("--grade-cap", cfg.grade_cap, "First-pass grade cap of the sequential strategy");
  cmd->add_option("--switch-cost", cfg.dummy_switch_cost, "Switch cost used for dummy grades");
  cmd->add_option("--tol", cfg.tol, "Grade tolerance");
  cmd->add_option("--max-phases", cfg.max_phases, "Doubling phase cap");
  cmd->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
  cmd->add_option("--oracle-cap", cfg.oracle_state_cap, "Largest joint state space the oracle may solve");
  cmd->add_flag("!--no-oracle", cfg.run_oracle, "Skip the oracle");
}

ordered_json pmf_json(const mg::SelectionCostPMF& pmf) {
  return ordered_json{{"support", pmf.support}, {"mass", pmf.mass}, {"mean", pmf.mean()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Markov games with switching costs: grades, strategies and exact oracles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mg::library_version());

  std::string file;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "Check an instance file");
  validate->add_option("file", file, "Instance JSON")->required();

  double grade_switch = 1.0;
  double grade_tol = mg::kDefaultGradeTol;
  auto* grade = app.add_subcommand("grade", "Grades and dummy grades of every chain state");
  grade->add_option("file", file, "Instance JSON")->required();
  grade->add_option("--switch-cost", grade_switch, "Dummy state cost")->check(CLI::PositiveNumber);
  grade->add_option("--tol", grade_tol, "Bisection tolerance");

  auto* pmf = app.add_subcommand("pmf", "Selection-cost distribution of every chain");
  pmf->add_option("file", file, "Instance JSON")->required();

  mg::ExperimentConfig sim_cfg;
  double sim_c = 0.0;
  std::string report_path;
  auto* simulate = app.add_subcommand("simulate", "Seeded multi-trial evaluation of one strategy");
  simulate->add_option("file", file, "Instance JSON")->required();
  simulate->add_option("--strategy", sim_cfg.strategy, "Strategy")->check(CLI::IsMember(mg::strategy_ids()));
  simulate->add_option("--report", report_path, "Append the report to this file instead of printing it");
  simulate->add_flag("--no-timestamp", "Omit the timestamp from printed reports");
  add_experiment_options(simulate, sim_cfg, sim_c);

  int oracle_k = 1;
  std::string oracle_start = "root";
  mg::OracleOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "Optimal expected cost by value iteration");
  oracle->add_option("file", file, "Instance JSON")->required();
  oracle->add_option("--k", oracle_k, "Reward target (defaults to the instance's)");
  oracle->add_option("--start", oracle_start, "root or a chain id to start active on");
  oracle->add_option("--tol", oracle_opts.tol, "Sup-norm stopping tolerance");
  oracle->add_option("--cap", oracle_opts.state_cap, "Joint state cap");

  mg::ExperimentConfig cmp_cfg;
  double cmp_c = 0.0;
  std::vector<std::string> cmp_strategies;
  auto* compare = app.add_subcommand("compare", "Run several strategies on one instance");
  compare->add_option("file", file, "Instance JSON")->required();
  compare->add_option("--strategies", cmp_strategies, "Strategies to compare")
      ->delimiter(',')
      ->check(CLI::IsMember(mg::strategy_ids()));
  add_experiment_options(compare, cmp_cfg, cmp_c);

  std::string scenario_name;
  mg::ScenarioParams sp;
  double scenario_a = -1.0;
  auto* scenario = app.add_subcommand("scenario", "Write a built-in instance");
  scenario->add_option("name", scenario_name, "Scenario")
      ->required()
      ->check(CLI::IsMember({"banks_sundaram", "dtw_counterexample", "paper_micro"}));
  scenario->add_option("--x", sp.x, "Mixture probability of the costly branch");
  scenario->add_option("--c", sp.c, "Mixture first-step cost and switch cost");
  scenario->add_option("--a", scenario_a, "Delta chain cost (default (2 + x) c / (1 - x))");
  scenario->add_option("--epsilon", sp.counterexample.epsilon, "Counterexample success probability");
  scenario->add_option("--n", sp.counterexample.chains_per_kind, "Counterexample chains per kind");
  scenario->add_option("--M", sp.counterexample.expensive, "Counterexample expensive state cost");
  scenario->add_option("--out", out_path, "Output file (stdout when absent)");

  mg::GeneratorParams gp;
  std::uint64_t gen_seed = 1;
  std::string metric = "unit";
  auto* gen = app.add_subcommand("gen", "Write a random instance");
  gen->add_option("--chains", gp.chains, "Number of chains")->check(CLI::PositiveNumber);
  gen->add_option("--max-states", gp.max_states, "Largest chain size")->check(CLI::Range(2, 1000));
  gen->add_option("--cost-min", gp.cost_min, "Smallest move cost");
  gen->add_option("--cost-max", gp.cost_max, "Largest move cost");
  gen->add_option("--metric", metric, "unit or random")->check(CLI::IsMember({"unit", "random"}));
  gen->add_option("--k", gp.reward_target, "Reward target");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--out", out_path, "Output file (stdout when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*validate) {
      const mg::MetricInstance m = mg::parse_instance_unchecked(mg::read_text_file(file));
      const mg::ValidationReport report = mg::validate_instance(m);
      if (!report.ok()) {
        for (const auto& v : report.violations) std::cout << "violation: " << v << "\n";
        return kExitFailure;
      }
      std::cout << "ok: " << m.chain_count() << " chains, K = " << m.reward_target << "\n";
    } else if (*grade) {
      const mg::MetricInstance m = mg::parse_instance(file);
      ordered_json chains = ordered_json::array();
      for (const auto& chain : m.chains) {
        const mg::GradeTable t = mg::compute_grade_table(chain, grade_switch, grade_tol);
        chains.push_back({{"states", chain.labels}, {"grade", t.grade}, {"dummy_grade", t.dummy_grade}});
      }
      std::cout << ordered_json{{"switch_cost", grade_switch}, {"chains", chains}}.dump(2) << "\n";
    } else if (*pmf) {
      mg::MetricInstance m = mg::parse_instance(file);
      m.reset_positions();
      ordered_json chains = ordered_json::array();
      for (int i = 0; i < m.chain_count(); ++i) {
        const auto& chain = m.chains[static_cast<std::size_t>(i)];
        const auto pos = m.chain_positions[static_cast<std::size_t>(i)];
        ordered_json j = pmf_json(mg::selection_cost_pmf(chain, mg::compute_grades(chain), pos));
        j["from"] = chain.label(pos);
        j["never_quit_cost"] = mg::never_quit_cost(chain, pos);
        chains.push_back(j);
      }
      std::cout << ordered_json{{"chains", chains}}.dump(2) << "\n";
    } else if (*simulate) {
      if (simulate->count("--c") > 0) sim_cfg.c = sim_c;
      sim_cfg.instance_source = file;
      const mg::MetricInstance m = mg::parse_instance(file);
      const mg::Report report = mg::run_experiment(sim_cfg, m);
      if (!report_path.empty()) {
        std::cout << "appended run " << mg::append_report(report, report_path) << " to " << report_path << "\n";
      } else {
        std::cout << mg::serialize_report(report, simulate->count("--no-timestamp") == 0);
      }
    } else if (*oracle) {
      const mg::MetricInstance m = mg::parse_instance(file);
      const int k = oracle->count("--k") > 0 ? oracle_k : m.reward_target;
      const mg::ChainId start = oracle_start == "root" ? mg::kRoot : std::stoi(oracle_start);
      const mg::OracleResult r = mg::solve_optimal(m, k, start, oracle_opts);
      ordered_json j{{"value", r.optimal_expected_cost}, {"state_count", r.state_count},
                     {"residual", r.residual},         {"sweeps", r.sweeps},
                     {"converged", r.converged}};
      std::cout << j.dump(2) << "\n";
    } else if (*compare) {
      if (cmp_strategies.size() < 2) throw CLI::ValidationError("--strategies", "needs at least two strategies");
      if (compare->count("--c") > 0) cmp_cfg.c = cmp_c;
      cmp_cfg.instance_source = file;
      const mg::MetricInstance m = mg::parse_instance(file);
      std::vector<mg::ExperimentConfig> configs;
      for (const auto& s : cmp_strategies) {
        mg::ExperimentConfig c = cmp_cfg;
        c.strategy = s;
        configs.push_back(c);
      }
      std::cout << mg::serialize_comparison(mg::compare_strategies(configs, m));
    } else if (*scenario) {
      if (scenario->count("--a") > 0) sp.a = scenario_a;
      emit(mg::serialize_instance(mg::make_scenario(scenario_name, sp)), out_path);
    } else if (*gen) {
      gp.metric = metric == "unit" ? mg::MetricKind::unit : mg::MetricKind::random;
      emit(mg::serialize_instance(mg::gen_random_instance(gp, gen_seed)), out_path);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const mg::InstanceValidationError& e) {
    std::cerr << "invalid instance: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
