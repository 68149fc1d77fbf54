#pragma once

#include <functional>
#include <string>

#include "pasm/policy.hpp"

namespace pasm {

struct EvalReport {
  double expected_utility = 0.0;
  double std_error = 0.0;
  double mean_batches = 0.0;
  int max_batches = 0;
  long trials = 0;  // enumerated leaves (exact) or simulated runs (mc)
  std::string method;
};

/**
 * Runs the policy against one sampled realization, drawing its internal
 * randomness from `rng`. The returned trace carries the realized
 * utility f(selected, phi).
 */
RunTrace simulate_run(const Policy& policy, const Realization& phi,
                      std::mt19937_64& rng);

/**
 * Exact expected utility by exhausting every internal coin flip and
 * every positive-probability observation outcome of the policy. The
 * optional callback sees each leaf trace with its path probability;
 * leaf realized_utility holds E[f(S, Phi) | observations of the leaf].
 */
EvalReport exact_expected_utility(
    const Policy& policy,
    const std::function<void(const RunTrace&, double)>& on_leaf = nullptr,
    long leaf_cap = 2'000'000);

/** Monte-Carlo estimate over `trials` independent runs, seeded. */
EvalReport mc_expected_utility(const Policy& policy, long trials,
                               std::uint64_t seed);

/**
 * Expected gain of running the policy on top of an already selected set
 * S under information state psi: E[f(S u E(pi, Phi), Phi) - f(S, Phi)]
 * with Phi ~ p(. | psi). The policy itself starts uninformed; psi only
 * conditions the environment.
 */
double marginal_policy(const Policy& policy, const ItemSet& selected,
                       const PartialRealization& psi);

}  // namespace pasm
