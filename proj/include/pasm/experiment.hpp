#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pasm/oracle.hpp"
#include "pasm/policies.hpp"

namespace pasm {

struct ExperimentConfig {
  std::string policy = "pa-greedy";
  std::vector<double> alpha_grid = {0.0, 0.25, 0.5, 0.75, 1.0};
  Constraint constraint = CardinalityConstraint{1};
  long trials = 100'000;          // Monte-Carlo fallback sample count
  std::uint64_t seed = 1;
  bool with_oracle = true;
  std::optional<int> max_batches; // explicit truncation
  bool auto_batch_budget = false; // derive the truncation from the
                                  // closed-form batch budget
  OracleLimits limits;
};

struct ResultRow {
  std::string instance_id;
  std::string policy;
  double alpha = 0.0;
  std::string constraint;
  std::string method;  // "exact" or "mc"
  double expected_utility = 0.0;
  double std_error = 0.0;
  double mean_batches = 0.0;
  int max_batches = 0;
  bool has_oracle = false;
  double oracle_value = 0.0;
  double ratio = 0.0;
  double theorem_bound = 0.0;
  bool bound_satisfied = true;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  bool bounds_ok = true;    // every row's guarantee held
  bool tradeoff_ok = true;  // utility and batch count rise with alpha
  std::vector<std::string> notes;
};

/** Builds the named policy at one adaptivity level. Aliases
 *  "fully-adaptive" and "non-adaptive" pin alpha to 1 and 0. */
PolicyPtr make_policy(std::shared_ptr<const Instance> inst,
                      const std::string& name, double alpha,
                      const Constraint& constraint,
                      MarginalMode mode = MarginalMode::exact());

/** The guarantee the evaluated policy carries at this alpha: the
 *  mixture bound for mixed knapsack runs, the monotone or the general
 *  cardinality-greedy bound otherwise, 0 when no theorem applies. */
double theorem_bound_for(const std::string& policy_name, double alpha,
                         bool monotone_passed);

/**
 * Sweeps the alpha grid for one instance: evaluates the policy exactly
 * when the instance is enumerable (Monte-Carlo past the caps), computes
 * the optimal adaptive value once, and flags every bound or tradeoff
 * violation in the result.
 */
ExperimentResult run_experiment(std::shared_ptr<const Instance> inst,
                                const ExperimentConfig& config);

std::string csv_header();
std::string csv_row(const ResultRow& row);
void write_csv(const std::vector<ResultRow>& rows, const std::string& path);

}  // namespace pasm
