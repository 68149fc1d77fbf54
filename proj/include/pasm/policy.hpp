#pragma once

#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pasm/marginals.hpp"
#include "pasm/model.hpp"

namespace pasm {

enum class TerminationReason {
  BudgetExhausted,
  CardinalityReached,
  NoPositiveDensity,
  GroundExhausted,
  TruncatedAtT,
};

std::string to_string(TerminationReason r);

/** Items selected while one batch was open, plus the states revealed
 *  when it closed. The final batch of a run is often never revealed. */
struct BatchRecord {
  std::vector<ItemId> items;
  std::vector<Observation> observed;
};

/** Decision data for one selection step, kept for post-hoc audits.
 *  lhs/rhs are the two sides of the stay-in-batch comparison evaluated
 *  before any reveal happened at this step. */
struct IterationRecord {
  int t = 0;          // 1-based selection index
  int batch = 0;      // batch the selected item landed in
  ItemId chosen = -1;
  bool stayed = true;  // false when this step opened a new batch
  double decision_lhs = 0.0;
  double decision_rhs = 0.0;
};

struct RunTrace {
  std::vector<BatchRecord> batches;
  ItemSet selected;
  std::vector<ItemId> selection_order;
  std::vector<IterationRecord> iterations;
  ItemSet sampled_pool;  // the coin-sampled candidate pool R, when used
  bool used_sampled_pool = false;
  int batch_count = 0;
  double realized_utility = std::numeric_limits<double>::quiet_NaN();
  TerminationReason reason = TerminationReason::GroundExhausted;
};

/**
 * Environment a policy runs against. Randomness and observations flow
 * through here so the same policy code serves Monte-Carlo simulation
 * and exhaustive path enumeration. select/open_batch are cooperative
 * control points: a refusal means the policy must halt immediately.
 */
class PolicyContext {
 public:
  virtual ~PolicyContext() = default;

  /** Draw from the policy's own randomness; weights are nonnegative and
   *  sum to 1. Returns the chosen index. */
  virtual int choose(std::span<const double> weights) = 0;

  /** States of `items` under the environment's realization. */
  virtual std::vector<int> reveal(std::span<const ItemId> items) = 0;

  /** Called before each selection; false halts the run (level cap). */
  virtual bool select(ItemId e) { (void)e; return true; }

  /** Called before opening batch 2, 3, ...; false halts the run. */
  virtual bool open_batch() { return true; }

  /** Stream for Monte-Carlo marginals; null under exact enumeration. */
  virtual std::mt19937_64* rng() { return nullptr; }

  /** Evaluator shared across runs of one evaluation, if any. */
  virtual std::shared_ptr<ExactEvaluator> shared_exact() { return nullptr; }
};

class Policy {
 public:
  virtual ~Policy() = default;

  /** The instance the policy executes over. May contain dummy items
   *  appended to the instance the policy was built from. */
  virtual const Instance& instance() const = 0;

  virtual RunTrace run(PolicyContext& ctx) const = 0;

  virtual std::string name() const = 0;
};

using PolicyPtr = std::shared_ptr<const Policy>;

}  // namespace pasm
