#pragma once

#include <random>
#include <string>
#include <variant>
#include <vector>

#include "pasm/realization.hpp"
#include "pasm/types.hpp"
#include "pasm/utility.hpp"

namespace pasm {

inline constexpr long kDefaultEnumerationCap = 1'000'000;

/** Select at most k items (every item counts 1). */
struct CardinalityConstraint {
  int k = 1;
};

/** Total selected cost must stay within the budget. */
struct KnapsackConstraint {
  double budget = 1.0;
};

using Constraint = std::variant<CardinalityConstraint, KnapsackConstraint>;

std::string constraint_label(const Constraint& c);

/** Number of possible states per item; labels are 0..count-1. */
struct StateSpace {
  std::vector<int> states_per_item;

  int num_items() const { return static_cast<int>(states_per_item.size()); }
  int num_states(ItemId e) const {
    return states_per_item.at(static_cast<size_t>(e));
  }
};

/** Nonnegative per-item costs; cardinality mode treats every cost as 1. */
struct CostFunction {
  std::vector<double> costs;

  double cost(ItemId e) const { return costs.at(static_cast<size_t>(e)); }
  double total(const ItemSet& s) const {
    double c = 0.0;
    for (ItemId e : s.to_vector()) c += cost(e);
    return c;
  }
};

/** One realization with its probability mass. */
struct ExplicitRow {
  Realization phi;
  double p = 0.0;
};

/**
 * Distribution over realizations: either a product of per-item
 * categoricals or an explicit weighted list of realizations.
 */
class Prior {
 public:
  enum class Kind { Independent, Explicit };

  static Prior independent(std::vector<std::vector<double>> probs);
  static Prior explicit_rows(std::vector<ExplicitRow> rows);

  Kind kind() const { return kind_; }
  int num_items() const;

  const std::vector<std::vector<double>>& marginals() const;
  const std::vector<ExplicitRow>& rows() const;

 private:
  Prior() = default;
  Kind kind_ = Kind::Independent;
  std::vector<std::vector<double>> probs_;  // Independent
  std::vector<ExplicitRow> rows_;           // Explicit
};

/**
 * A problem instance: ground set with states, costs, a prior over
 * realizations and a utility function. Items with id >= num_real_items()
 * are dummies (single state, zero cost, no effect on utility).
 */
class Instance {
 public:
  Instance(std::string id, StateSpace states, CostFunction costs, Prior prior,
           UtilityFunction utility, int num_real);

  const std::string& id() const { return id_; }
  int num_items() const { return states_.num_items(); }
  int num_real_items() const { return num_real_; }
  bool is_dummy(ItemId e) const { return e >= num_real_; }
  int num_states(ItemId e) const { return states_.num_states(e); }
  double cost(ItemId e) const { return costs_.cost(e); }
  double total_cost(const ItemSet& s) const { return costs_.total(s); }
  double min_real_cost() const;

  const StateSpace& state_space() const { return states_; }
  const CostFunction& cost_function() const { return costs_; }
  const Prior& prior() const { return prior_; }
  const UtilityFunction& utility() const { return utility_; }

  double utility_value(const ItemSet& selected, const Realization& phi) const {
    return utility_.evaluate(selected, phi, num_real_);
  }

  /** All real item ids as a set. */
  ItemSet real_items() const;

  /** Copy of this instance with `count` dummy items appended. */
  Instance with_dummy_items(int count) const;

 private:
  std::string id_;
  StateSpace states_;
  CostFunction costs_;
  Prior prior_;
  UtilityFunction utility_;
  int num_real_;
};

/**
 * Posterior over realizations given the observations in psi.
 * Throws ConditioningError when psi has zero probability.
 */
Prior condition_prior(const Prior& prior, const PartialRealization& psi);

/** Draws one realization from the prior conditioned on psi. */
Realization sample_realization(const Prior& prior, const PartialRealization& psi,
                               std::mt19937_64& rng);

/**
 * All positive-probability realizations with their masses. Throws
 * EnumerationCapError when the support exceeds `cap`.
 */
std::vector<ExplicitRow> enumerate_realizations(
    const Prior& prior, long cap = kDefaultEnumerationCap);

/** Uniform double in [0, 1) from the top 53 bits of one rng draw. */
inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace pasm
