#pragma once

#include <map>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "pasm/model.hpp"

namespace pasm {

/** How expectations over states are computed. */
struct MarginalMode {
  enum class Kind { Exact, MonteCarlo };
  Kind kind = Kind::Exact;
  long samples = 1024;

  static MarginalMode exact() { return {Kind::Exact, 0}; }
  static MarginalMode monte_carlo(long samples = 1024) {
    if (samples <= 0) throw ConfigError("monte_carlo: samples must be positive");
    return {Kind::MonteCarlo, samples};
  }
};

/**
 * Exact conditional expectations over an enumerable prior, with caching.
 * The full realization support is enumerated once; conditioning filters
 * it, and E[f(S, Phi) | psi] values are memoized on (S, canonical psi).
 *
 * Instances are cheap to share across runs of the same policy; they are
 * not safe for concurrent mutation.
 */
class ExactEvaluator {
 public:
  explicit ExactEvaluator(const Instance& inst,
                          long cap = kDefaultEnumerationCap);

  const Instance& instance() const { return inst_; }

  /** E[f(S, Phi) | Phi ~ psi]. */
  double expected_value(const ItemSet& selected, const PartialRealization& psi);

  /** Delta(e | S, psi); zero when e is already in S. */
  double marginal(ItemId e, const ItemSet& selected,
                  const PartialRealization& psi);

  /** P[Phi(e) = s | psi] for every state s of item e. */
  std::vector<double> state_distribution(ItemId e,
                                         const PartialRealization& psi);

  /** Unnormalized P[Phi ~ psi] under the prior. */
  double probability(const PartialRealization& psi);

  const std::vector<ExplicitRow>& rows() const { return rows_; }

 private:
  struct Conditional {
    std::vector<int> row_idx;
    std::vector<double> probs;  // renormalized
    double z = 0.0;
  };
  using PsiKey = std::vector<int>;

  static PsiKey key_of(const PartialRealization& psi);
  const Conditional& conditional(const PartialRealization& psi);

  const Instance& inst_;
  std::vector<ExplicitRow> rows_;
  std::map<PsiKey, Conditional> cond_cache_;
  std::map<std::pair<PsiKey, std::uint64_t>, double> value_cache_;
};

/**
 * Marginal computation bound to one instance and one mode. Exact mode
 * funnels through a (possibly shared) ExactEvaluator; Monte-Carlo mode
 * averages over conditioned draws from the supplied stream.
 */
class MarginalEngine {
 public:
  MarginalEngine(const Instance& inst, MarginalMode mode,
                 std::shared_ptr<ExactEvaluator> shared_exact = nullptr,
                 std::mt19937_64* rng = nullptr);

  const Instance& instance() const { return inst_; }
  const MarginalMode& mode() const { return mode_; }

  double marginal(ItemId e, const ItemSet& selected,
                  const PartialRealization& psi);
  double expected_value(const ItemSet& selected, const PartialRealization& psi);

  ExactEvaluator& exact();

 private:
  const Instance& inst_;
  MarginalMode mode_;
  std::shared_ptr<ExactEvaluator> exact_;
  std::mt19937_64* rng_;
};

/**
 * Delta(e | S, psi) as a one-off computation. Monte-Carlo mode requires
 * a stream.
 */
double marginal_item(const Instance& inst, ItemId e, const ItemSet& selected,
                     const PartialRealization& psi,
                     MarginalMode mode = MarginalMode::exact(),
                     std::mt19937_64* rng = nullptr);

}  // namespace pasm
