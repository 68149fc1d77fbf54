#pragma once

#include <string>
#include <vector>

#include "pasm/policy.hpp"

namespace pasm {

struct AuditResult {
  bool ok = true;
  long checks = 0;
  std::vector<std::string> failures;
};

/**
 * Replays a recorded batch-greedy run under a cardinality constraint and
 * verifies every logged decision from scratch: the chosen item lies in
 * the current top-k set, the stay/close comparison was evaluated
 * correctly under the information state of the moment, and the batch
 * observation log is internally consistent. `exec_inst` must be the
 * instance the run executed over (including any dummy items).
 */
AuditResult audit_cardinality_trace(const Instance& exec_inst, double alpha,
                                    int k, const RunTrace& trace,
                                    double tol = 1e-9);

/**
 * Replays a recorded density-greedy run under a knapsack constraint:
 * selections stay inside the sampled pool and the budget, every chosen
 * item maximizes density among the remaining pool under the stale
 * information state, within-batch densities clear alpha times the batch
 * opener's density, and batch closes only happen when that bar was
 * genuinely missed.
 */
AuditResult audit_density_trace(const Instance& inst, double alpha,
                                double budget, const RunTrace& trace,
                                double tol = 1e-9);

}  // namespace pasm
