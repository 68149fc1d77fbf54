#include "pasm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "pasm/eval.hpp"

namespace pasm {

namespace {

/** "fully-adaptive" / "non-adaptive" pin alpha and pick the greedy
 *  that matches the constraint kind. */
void resolve_alias(std::string& name, double& alpha, const Constraint& c) {
  bool cardinality = std::holds_alternative<CardinalityConstraint>(c);
  if (name == "fully-adaptive") {
    name = cardinality ? "pa-greedy" : "density-greedy";
    alpha = 1.0;
  } else if (name == "non-adaptive") {
    name = cardinality ? "pa-greedy" : "density-greedy";
    alpha = 0.0;
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

}  // namespace

PolicyPtr make_policy(std::shared_ptr<const Instance> inst,
                      const std::string& name, double alpha,
                      const Constraint& constraint, MarginalMode mode) {
  std::string resolved = name;
  double a = alpha;
  resolve_alias(resolved, a, constraint);

  if (resolved == "pa-greedy") {
    const auto* card = std::get_if<CardinalityConstraint>(&constraint);
    if (!card) throw ConfigError("pa-greedy needs a cardinality constraint");
    return std::make_shared<PartialAdaptiveGreedy>(std::move(inst), a, card->k,
                                                   mode);
  }
  if (resolved == "density-greedy") {
    const auto* ks = std::get_if<KnapsackConstraint>(&constraint);
    if (!ks) throw ConfigError("density-greedy needs a knapsack constraint");
    return std::make_shared<DensityGreedy>(std::move(inst), a, ks->budget,
                                           mode);
  }
  if (resolved == "mixed-knapsack") {
    const auto* ks = std::get_if<KnapsackConstraint>(&constraint);
    if (!ks) throw ConfigError("mixed-knapsack needs a knapsack constraint");
    return std::make_shared<MixedKnapsackPolicy>(std::move(inst), a, ks->budget,
                                                 mode);
  }
  if (resolved == "best-singleton") {
    std::optional<double> budget;
    if (const auto* ks = std::get_if<KnapsackConstraint>(&constraint))
      budget = ks->budget;
    return std::make_shared<BestSingletonPolicy>(std::move(inst), budget);
  }
  throw ConfigError("unknown policy '" + name + "'");
}

double theorem_bound_for(const std::string& policy_name, double alpha,
                         bool monotone_passed) {
  if (policy_name == "mixed-knapsack")
    return alpha > 0.0 ? 1.0 / (6.0 + 4.0 / alpha) : 0.0;
  if (policy_name == "pa-greedy" || policy_name == "fully-adaptive" ||
      policy_name == "non-adaptive")
    return monotone_passed ? 1.0 - std::exp(-alpha) : alpha / std::numbers::e;
  return 0.0;  // no stated guarantee for this policy on its own
}

ExperimentResult run_experiment(std::shared_ptr<const Instance> inst,
                                const ExperimentConfig& config) {
  std::string base = config.policy;
  std::vector<double> grid = config.alpha_grid;
  if (base == "fully-adaptive" || base == "non-adaptive") {
    double pinned = 0.0;
    resolve_alias(base, pinned, config.constraint);
    grid = {pinned};
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw ConfigError("run_experiment: empty alpha grid");

  ExperimentResult result;
  double oracle = 0.0;
  bool monotone = false;
  if (config.with_oracle) {
    oracle = optimal_adaptive_value(*inst, config.constraint, config.limits);
    try {
      monotone =
          check_adaptive_monotonicity(*inst, 1e-9, config.limits).holds;
    } catch (const EnumerationCapError&) {
      monotone = false;  // fall back to the bound without monotonicity
    }
  }

  for (double alpha : grid) {
    PolicyPtr pi = make_policy(inst, base, alpha, config.constraint);
    if (config.max_batches) {
      pi = truncate_batches(pi, *config.max_batches);
    } else if (config.auto_batch_budget) {
      const auto* ks = std::get_if<KnapsackConstraint>(&config.constraint);
      if (!ks)
        throw ConfigError("the batch budget formula needs a knapsack run");
      BatchBudget bb = batch_budget_T(inst->num_real_items(), ks->budget,
                                      inst->min_real_cost(), alpha);
      if (bb.degenerate || bb.batches < 1)
        result.notes.push_back("alpha=" + fmt(alpha) +
                               ": batch budget degenerate, no truncation");
      else
        pi = truncate_batches(pi, bb.batches);
    }

    ResultRow row;
    row.instance_id = inst->id();
    row.policy = pi->name();
    row.alpha = alpha;
    row.constraint = constraint_label(config.constraint);

    EvalReport rep;
    try {
      rep = exact_expected_utility(*pi);
      row.method = "exact";
    } catch (const EnumerationCapError&) {
      rep = mc_expected_utility(*pi, config.trials, config.seed);
      row.method = "mc";
    }
    row.expected_utility = rep.expected_utility;
    row.std_error = rep.std_error;
    row.mean_batches = rep.mean_batches;
    row.max_batches = rep.max_batches;

    if (config.with_oracle) {
      row.has_oracle = true;
      row.oracle_value = oracle;
      row.theorem_bound = theorem_bound_for(base, alpha, monotone);
      if (oracle > 1e-12) {
        row.ratio = row.expected_utility / oracle;
        double slack =
            row.method == "exact" ? 1e-9 : 3.0 * row.std_error / oracle;
        row.bound_satisfied = row.ratio >= row.theorem_bound - slack;
      } else {
        row.ratio = 0.0;
        row.bound_satisfied = row.expected_utility >= -1e-9;
      }
      if (!row.bound_satisfied) {
        result.bounds_ok = false;
        result.notes.push_back("alpha=" + fmt(alpha) + ": ratio " +
                               fmt(row.ratio) + " below bound " +
                               fmt(row.theorem_bound));
      }
    }
    result.rows.push_back(std::move(row));
  }

  // utility and batch count should both rise with adaptivity, up to
  // sampling noise
  for (size_t i = 0; i + 1 < result.rows.size(); ++i) {
    const ResultRow& lo = result.rows[i];
    const ResultRow& hi = result.rows[i + 1];
    double slack = 3.0 * std::hypot(lo.std_error, hi.std_error) + 1e-9;
    if (hi.expected_utility < lo.expected_utility - slack) {
      result.tradeoff_ok = false;
      result.notes.push_back("utility drops from alpha=" + fmt(lo.alpha) +
                             " to alpha=" + fmt(hi.alpha));
    }
    if (hi.mean_batches < lo.mean_batches - slack) {
      result.tradeoff_ok = false;
      result.notes.push_back("batch count drops from alpha=" + fmt(lo.alpha) +
                             " to alpha=" + fmt(hi.alpha));
    }
  }
  return result;
}

std::string csv_header() {
  return "instance_id,policy,alpha,constraint,method,expected_utility,stderr,"
         "mean_batches,max_batches,oracle_value,ratio,theorem_bound,"
         "bound_satisfied";
}

std::string csv_row(const ResultRow& row) {
  std::string out = row.instance_id + "," + row.policy + "," + fmt(row.alpha) +
                    "," + row.constraint + "," + row.method + "," +
                    fmt(row.expected_utility) + "," + fmt(row.std_error) + "," +
                    fmt(row.mean_batches) + "," +
                    std::to_string(row.max_batches) + ",";
  if (row.has_oracle)
    out += fmt(row.oracle_value) + "," + fmt(row.ratio) + "," +
           fmt(row.theorem_bound) + "," +
           (row.bound_satisfied ? "true" : "false");
  else
    out += ",,,";
  return out;
}

void write_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << csv_header() << "\n";
  for (const ResultRow& row : rows) out << csv_row(row) << "\n";
}

}  // namespace pasm
