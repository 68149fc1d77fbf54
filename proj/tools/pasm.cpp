#include <cstdint>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "json.hpp"
#include "pasm/experiment.hpp"
#include "pasm/generators.hpp"
#include "pasm/instance_io.hpp"

namespace {

using nlohmann::json;

json witness_json(const pasm::CheckerWitness& w) {
  auto obs_list = [](const std::vector<pasm::Observation>& obs) {
    json out = json::array();
    for (const pasm::Observation& o : obs)
      out.push_back({{"item", o.item}, {"state", o.state}});
    return out;
  };
  json j;
  j["psi"] = obs_list(w.psi);
  j["psi_prime"] = obs_list(w.psi_prime);
  if (w.item >= 0) j["item"] = w.item;
  return j;
}

json report_json(const pasm::CheckerReport& rep) {
  json j;
  j["property"] = rep.property;
  j["holds"] = rep.holds;
  j["worst_violation"] = rep.worst_violation;
  j["tolerance"] = rep.tolerance;
  j["comparisons"] = rep.comparisons;
  j["witness"] = rep.witness ? witness_json(*rep.witness) : json();
  return j;
}

struct ConstraintArgs {
  int k = -1;
  double budget = -1.0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--k", k, "cardinality constraint");
    cmd->add_option("--budget", budget, "knapsack budget");
  }

  bool given() const { return k >= 0 || budget >= 0.0; }

  pasm::Constraint get() const {
    if (k >= 0 && budget >= 0.0)
      throw pasm::ConfigError("give either --k or --budget, not both");
    if (k >= 0) return pasm::CardinalityConstraint{k};
    if (budget >= 0.0) return pasm::KnapsackConstraint{budget};
    throw pasm::ConfigError("a constraint is required: --k K or --budget B");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch-mode adaptive submodular maximization simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand(
      "run", "sweep an alpha grid and report utilities against the oracle");
  std::string run_instance, run_policy = "pa-greedy", run_out;
  std::vector<double> run_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  long run_trials = 100'000;
  std::uint64_t run_seed = 1;
  bool run_no_oracle = false, run_auto_t = false;
  int run_max_batches = -1;
  ConstraintArgs run_constraint;
  run->add_option("--instance", run_instance, "instance JSON file")
      ->required();
  run->add_option("--policy", run_policy,
                  "pa-greedy | density-greedy | mixed-knapsack | "
                  "best-singleton | fully-adaptive | non-adaptive");
  run->add_option("--alpha-grid", run_grid, "comma-separated alpha values")
      ->delimiter(',');
  run_constraint.attach(run);
  run->add_option("--trials", run_trials, "Monte-Carlo fallback trials");
  run->add_option("--seed", run_seed, "random seed");
  run->add_option("--out", run_out, "CSV output path (default: stdout)");
  run->add_flag("--no-oracle", run_no_oracle,
                "skip the optimal-value and ratio columns");
  run->add_option("--max-batches", run_max_batches,
                  "truncate every run after this many batches");
  run->add_flag("--auto-T", run_auto_t,
                "truncate using the closed-form batch budget");

  // oracle
  auto* oracle = app.add_subcommand(
      "oracle", "optimal adaptive value and best root actions");
  std::string oracle_instance;
  ConstraintArgs oracle_constraint;
  oracle->add_option("--instance", oracle_instance, "instance JSON file")
      ->required();
  oracle_constraint.attach(oracle);

  // check
  auto* check = app.add_subcommand(
      "check", "structural property reports for one instance");
  std::string check_instance;
  bool check_strong = false;
  ConstraintArgs check_constraint;
  check->add_option("--instance", check_instance, "instance JSON file")
      ->required();
  check_constraint.attach(check);
  check->add_flag("--strong", check_strong,
                  "also run the restriction-set policywise check (n <= 5)");

  // gen
  auto* gen = app.add_subcommand("gen", "write a generated instance");
  std::string gen_family, gen_out;
  int gen_n = 4, gen_states = 2;
  std::uint64_t gen_seed = 1;
  gen->add_option("--family", gen_family,
                  "weighted_coverage | coverage_penalty | version_space")
      ->required();
  gen->add_option("--n", gen_n, "number of items");
  gen->add_option("--states", gen_states, "states per item");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      auto inst = std::make_shared<const pasm::Instance>(
          pasm::parse_instance(run_instance));
      pasm::ExperimentConfig cfg;
      cfg.policy = run_policy;
      cfg.alpha_grid = run_grid;
      cfg.constraint = run_constraint.get();
      cfg.trials = run_trials;
      cfg.seed = run_seed;
      cfg.with_oracle = !run_no_oracle;
      if (run_max_batches >= 0) cfg.max_batches = run_max_batches;
      cfg.auto_batch_budget = run_auto_t;

      pasm::ExperimentResult res;
      try {
        res = pasm::run_experiment(inst, cfg);
      } catch (const pasm::EnumerationCapError& e) {
        std::cerr << "error: " << e.what()
                  << " (rerun with --no-oracle to skip ratio columns)\n";
        return 3;
      }
      if (run_out.empty()) {
        std::cout << pasm::csv_header() << "\n";
        for (const pasm::ResultRow& row : res.rows)
          std::cout << pasm::csv_row(row) << "\n";
      } else {
        pasm::write_csv(res.rows, run_out);
      }
      for (const std::string& note : res.notes)
        std::cerr << "note: " << note << "\n";
      return res.bounds_ok && res.tradeoff_ok ? 0 : 1;
    }

    if (oracle->parsed()) {
      pasm::Instance inst = pasm::parse_instance(oracle_instance);
      pasm::OracleReport rep =
          pasm::optimal_adaptive_report(inst, oracle_constraint.get(), {});
      json j;
      j["value"] = rep.value;
      json actions = json::array();
      for (const pasm::RootAction& a : rep.root_actions)
        actions.push_back(
            {{"action", a.action}, {"value", a.value}, {"best", a.best}});
      j["root_actions"] = std::move(actions);
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (check->parsed()) {
      pasm::Instance inst = pasm::parse_instance(check_instance);
      json reports = json::array();
      reports.push_back(report_json(pasm::check_adaptive_submodularity(inst)));
      reports.push_back(report_json(pasm::check_adaptive_monotonicity(inst)));
      if (check_constraint.given()) {
        pasm::Constraint c = check_constraint.get();
        reports.push_back(report_json(pasm::check_weak_policywise(inst, c)));
        if (check_strong)
          reports.push_back(report_json(pasm::check_policywise_strong(inst, c)));
      } else if (check_strong) {
        throw pasm::ConfigError("--strong needs --k or --budget");
      }
      std::cout << reports.dump(2) << "\n";
      return 0;
    }

    if (gen->parsed()) {
      pasm::Instance inst =
          pasm::generate_instance(gen_family, gen_n, gen_states, gen_seed);
      pasm::write_instance(inst, gen_out);
      std::cout << "wrote " << inst.id() << " to " << gen_out << "\n";
      return 0;
    }
  } catch (const pasm::EnumerationCapError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
