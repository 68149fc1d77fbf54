#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pasm/marginals.hpp"
#include "pasm/model.hpp"

namespace pasm {

/** Size guards for exhaustive computations over belief states. */
struct OracleLimits {
  int max_items = 8;    // non-dummy items
  int max_states = 4;   // states per item
  long max_realizations = kDefaultEnumerationCap;
};

struct RootAction {
  std::string action;  // "stop" or "select <id>"
  double value = 0.0;
  bool best = false;
};

struct OracleReport {
  double value = 0.0;
  std::vector<RootAction> root_actions;
};

/**
 * Value of the optimal fully adaptive policy: selects one item at a
 * time, observes its state, and may stop at any point. Backward
 * induction over belief states (canonical partial realizations), with
 * the residual budget implied by the selected set.
 */
double optimal_adaptive_value(const Instance& inst, const Constraint& c,
                              const OracleLimits& limits = {});

/** Same value plus the stop/select values available at the root. */
OracleReport optimal_adaptive_report(const Instance& inst, const Constraint& c,
                                     const OracleLimits& limits = {});

/**
 * Independent recursion for the cardinality case that tracks remaining
 * picks explicitly; used to cross-check optimal_adaptive_value.
 */
double optimal_adaptive_value_cardinality(const Instance& inst, int k,
                                          const OracleLimits& limits = {});

struct CheckerWitness {
  std::vector<Observation> psi;        // smaller information state
  std::vector<Observation> psi_prime;  // larger information state
  ItemId item = -1;
};

struct CheckerReport {
  std::string property;
  bool holds = true;
  double worst_violation = 0.0;  // largest slack-exceeding gap found, >= 0
  double tolerance = 1e-9;
  long comparisons = 0;
  std::optional<CheckerWitness> witness;
};

/**
 * Exhaustive check that marginals never grow as information accumulates:
 * Delta(e | dom(psi), psi) >= Delta(e | dom(psi'), psi') for every
 * positive-probability pair psi inside psi' and every e outside psi'.
 */
CheckerReport check_adaptive_submodularity(const Instance& inst,
                                           double tol = 1e-9,
                                           const OracleLimits& limits = {});

/** Exhaustive check that all conditional marginals are nonnegative. */
CheckerReport check_adaptive_monotonicity(const Instance& inst,
                                          double tol = 1e-9,
                                          const OracleLimits& limits = {});

/**
 * Checks that no reachable information state offers a continuation
 * policy whose conditional gain exceeds the optimal value from scratch:
 * f_avg(opt) >= max_pi Delta(pi | dom(psi), psi), the continuation
 * budget being what remains after paying for dom(psi).
 */
CheckerReport check_weak_policywise(const Instance& inst, const Constraint& c,
                                    double tol = 1e-9,
                                    const OracleLimits& limits = {});

/**
 * Stronger variant quantifying over restriction sets S disjoint from
 * dom(psi'): the best gain from psi never beats the best gain from the
 * smaller psi under the same item restriction and budget. Exponential;
 * intended for n <= 5.
 */
CheckerReport check_policywise_strong(const Instance& inst, const Constraint& c,
                                      double tol = 1e-9,
                                      const OracleLimits& limits = {});

}  // namespace pasm
