#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "pasm/realization.hpp"
#include "pasm/types.hpp"

namespace pasm {

/**
 * Bipartite coverage: each (item, state) pair covers a fixed subset of
 * weighted ground elements; the value of (S, phi) is the total weight
 * of elements covered by the selected items under their phi-states.
 */
struct WeightedCoverageParams {
  int num_elements = 0;
  std::vector<double> weights;                      // per element, >= 0
  std::vector<std::vector<std::vector<int>>> covers;  // [item][state] -> elements
};

/** Coverage minus a fixed per-item penalty; values may go negative. */
struct CoverageWithPenaltyParams {
  WeightedCoverageParams base;
  std::vector<double> penalties;  // per item, >= 0
};

/**
 * Mass of hypotheses ruled out by the observed states of the selected
 * items. Hypothesis h predicts answers[h] and is eliminated once some
 * selected item's state disagrees with its prediction.
 */
struct VersionSpaceParams {
  std::vector<Realization> answers;  // one prediction vector per hypothesis
  std::vector<double> masses;        // per hypothesis, >= 0
};

/** Explicit (selected set, realization) -> value table for tiny instances. */
struct TabularParams {
  using Key = std::pair<std::vector<ItemId>, std::vector<int>>;
  std::map<Key, double> table;
};

class UtilityFunction {
 public:
  UtilityFunction() = default;
  explicit UtilityFunction(WeightedCoverageParams p) : impl_(std::move(p)) {}
  explicit UtilityFunction(CoverageWithPenaltyParams p) : impl_(std::move(p)) {}
  explicit UtilityFunction(VersionSpaceParams p) : impl_(std::move(p)) {}
  explicit UtilityFunction(TabularParams p) : impl_(std::move(p)) {}

  /**
   * f(S, phi). Item ids >= num_real are dummies and contribute nothing;
   * phi may be longer than num_real, the extra entries are ignored.
   */
  double evaluate(const ItemSet& selected, const Realization& phi,
                  int num_real) const;

  std::string kind_name() const;

  template <class T>
  const T* get_if() const {
    return std::get_if<T>(&impl_);
  }

 private:
  std::variant<WeightedCoverageParams, CoverageWithPenaltyParams,
               VersionSpaceParams, TabularParams>
      impl_;
};

}  // namespace pasm
