#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "pasm/policy.hpp"

namespace pasm {

/**
 * The k items of the engine's instance with the largest marginals on
 * top of (selected, psi), drawn from the complement of `selected`.
 * Ties break toward the lower item id. With enough zero-marginal dummy
 * items around, the result never contains a negative-marginal item.
 */
ItemSet top_k_set(MarginalEngine& engine, const ItemSet& selected,
                  const PartialRealization& psi, int k);

/** Sum of Delta(e | selected, psi) over the members of `m`. */
double marginal_sum(MarginalEngine& engine, const ItemSet& m,
                    const ItemSet& selected, const PartialRealization& psi);

/**
 * Item maximizing E[f({e}, Phi)] (ties toward the lower id) and that
 * expectation. Only items with cost <= budget are considered when a
 * budget is given.
 */
std::pair<ItemId, double> best_singleton(
    const Instance& inst, std::optional<double> budget = std::nullopt);

/** Mixing probabilities for the knapsack mixture policy; alpha > 0. */
struct MixtureWeights {
  double singleton = 0.0;
  double density = 0.0;
};
MixtureWeights mixture_weights(double alpha);

/**
 * Batch budget for truncated runs: T = ceil(log_b(n / delta)) *
 * ceil(log_b(B / (c_min (1 - alpha)))) with b = 2 / (1 + alpha) and
 * delta = (1 - alpha) / log_b(B / (c_min (1 - alpha))). Requires
 * alpha in [0, 1). When the inner log is zero (B = c_min at alpha = 0)
 * the budget degenerates to T = 0 and is flagged.
 */
struct BatchBudget {
  int batches = 0;
  double delta = 0.0;
  bool degenerate = false;
};
BatchBudget batch_budget_T(int n, double budget, double min_cost, double alpha);

/**
 * Batch-mode greedy for a cardinality constraint. Runs exactly k steps
 * over the ground set extended with 2k - 1 dummy items. Each step keeps
 * filling the current batch while the top-k marginal mass under the
 * stale information state stays within a factor alpha of the top-k mass
 * after a hypothetical reveal; otherwise it closes the batch, observes
 * its states and restarts the comparison. The picked item is sampled
 * uniformly from the current top-k set.
 */
class PartialAdaptiveGreedy final : public Policy {
 public:
  PartialAdaptiveGreedy(std::shared_ptr<const Instance> base, double alpha,
                        int k, MarginalMode mode = MarginalMode::exact());

  const Instance& instance() const override { return *exec_; }
  RunTrace run(PolicyContext& ctx) const override;
  std::string name() const override { return "pa-greedy"; }

  int cardinality() const { return k_; }
  double alpha() const { return alpha_; }

 private:
  std::shared_ptr<const Instance> base_;
  std::shared_ptr<const Instance> exec_;  // base plus 2k - 1 dummies
  double alpha_;
  int k_;
  MarginalMode mode_;
};

/**
 * Batch-mode density greedy for a knapsack constraint. First keeps each
 * item with probability 1/2 (the pool R), then repeatedly selects the
 * highest-density item of the pool, staying in the current batch while
 * that density is at least alpha times the density the batch's first
 * item had when the batch opened. A new batch reveals all previous
 * selections; the run ends when the pool is exhausted, the next pick
 * does not fit the budget, or no remaining pool item has positive
 * density after a reveal.
 */
class DensityGreedy final : public Policy {
 public:
  DensityGreedy(std::shared_ptr<const Instance> base, double alpha,
                double budget, MarginalMode mode = MarginalMode::exact());

  const Instance& instance() const override { return *base_; }
  RunTrace run(PolicyContext& ctx) const override;
  std::string name() const override { return "density-greedy"; }

  double budget() const { return budget_; }
  double alpha() const { return alpha_; }

 private:
  std::shared_ptr<const Instance> base_;
  double alpha_;
  double budget_;
  MarginalMode mode_;
};

/** Selects the best singleton (within the budget, when given) and stops. */
class BestSingletonPolicy final : public Policy {
 public:
  explicit BestSingletonPolicy(std::shared_ptr<const Instance> base,
                               std::optional<double> budget = std::nullopt);

  const Instance& instance() const override { return *base_; }
  RunTrace run(PolicyContext& ctx) const override;
  std::string name() const override { return "best-singleton"; }

  ItemId chosen_item() const { return item_; }

 private:
  std::shared_ptr<const Instance> base_;
  ItemId item_;
};

/**
 * Knapsack mixture: best singleton with probability (1/alpha)/(3+2/alpha),
 * density greedy otherwise. The mixture coin is the first random draw of
 * every run. Requires alpha > 0.
 */
class MixedKnapsackPolicy final : public Policy {
 public:
  MixedKnapsackPolicy(std::shared_ptr<const Instance> base, double alpha,
                      double budget, MarginalMode mode = MarginalMode::exact());

  const Instance& instance() const override { return *base_; }
  RunTrace run(PolicyContext& ctx) const override;
  std::string name() const override { return "mixed-knapsack"; }

  const MixtureWeights& weights() const { return weights_; }

 private:
  std::shared_ptr<const Instance> base_;
  MixtureWeights weights_;
  BestSingletonPolicy singleton_;
  DensityGreedy density_;
};

/** Selects a fixed item sequence in one batch, skipping nothing. */
class FixedSetPolicy final : public Policy {
 public:
  FixedSetPolicy(std::shared_ptr<const Instance> base,
                 std::vector<ItemId> items);

  const Instance& instance() const override { return *base_; }
  RunTrace run(PolicyContext& ctx) const override;
  std::string name() const override { return "fixed-set"; }

 private:
  std::shared_ptr<const Instance> base_;
  std::vector<ItemId> items_;
};

/** pi @ pi2: runs pi to completion, then pi2 from a fresh information
 *  state over the union of selections. Both must share an instance. */
PolicyPtr concatenate(PolicyPtr first, PolicyPtr second);

/** Stops the wrapped policy after it has selected `level` items. */
PolicyPtr level_truncate(PolicyPtr inner, int level);

/** Halts the wrapped policy the moment it would open batch T + 1. */
PolicyPtr truncate_batches(PolicyPtr inner, int max_batches);

}  // namespace pasm
