#include "pasm/oracle.hpp"

#include <cstring>
#include <map>
#include <set>

namespace pasm {

namespace {

constexpr double kBudgetSlack = 1e-12;

void guard_size(const Instance& inst, const OracleLimits& limits,
                const char* what) {
  if (inst.num_real_items() > limits.max_items)
    throw EnumerationCapError(std::string(what) + ": instance has " +
                              std::to_string(inst.num_real_items()) +
                              " items, cap is " +
                              std::to_string(limits.max_items));
  for (ItemId e = 0; e < inst.num_real_items(); ++e)
    if (inst.num_states(e) > limits.max_states)
      throw EnumerationCapError(std::string(what) + ": item " +
                                std::to_string(e) + " has " +
                                std::to_string(inst.num_states(e)) +
                                " states, cap is " +
                                std::to_string(limits.max_states));
}

std::vector<int> psi_key(const PartialRealization& psi) {
  std::vector<int> key;
  key.reserve(static_cast<size_t>(psi.size()) * 2);
  for (const Observation& o : psi.canonical()) {
    key.push_back(o.item);
    key.push_back(o.state);
  }
  return key;
}

/** Backward induction over belief states; the remaining budget is
 *  implied by dom(psi), so states memoize on psi alone. */
class AdaptiveDp {
 public:
  AdaptiveDp(const Instance& inst, const Constraint& c,
             const OracleLimits& limits)
      : inst_(inst), c_(c), eval_(inst, limits.max_realizations) {}

  ExactEvaluator& eval() { return eval_; }

  bool can_select(const PartialRealization& psi, ItemId e) const {
    if (const auto* card = std::get_if<CardinalityConstraint>(&c_))
      return psi.domain().size() < card->k;
    const auto& ks = std::get<KnapsackConstraint>(c_);
    return inst_.total_cost(psi.domain()) + inst_.cost(e) <=
           ks.budget + kBudgetSlack;
  }

  /** Expected value of selecting e at psi and continuing optimally. */
  double action_value(const PartialRealization& psi, ItemId e) {
    std::vector<double> dist = eval_.state_distribution(e, psi);
    double v = 0.0;
    for (size_t s = 0; s < dist.size(); ++s) {
      if (dist[s] <= 0.0) continue;
      PartialRealization next = psi;
      next.observe(e, static_cast<int>(s));
      v += dist[s] * value(next);
    }
    return v;
  }

  double value(const PartialRealization& psi) {
    std::vector<int> key = psi_key(psi);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;

    double best = eval_.expected_value(psi.domain(), psi);  // stop here
    for (ItemId e = 0; e < inst_.num_real_items(); ++e) {
      if (psi.contains(e) || !can_select(psi, e)) continue;
      best = std::max(best, action_value(psi, e));
    }
    memo_.emplace(std::move(key), best);
    return best;
  }

 private:
  const Instance& inst_;
  Constraint c_;
  ExactEvaluator eval_;
  std::map<std::vector<int>, double> memo_;
};

/** All positive-probability partial realizations over the real items. */
std::vector<PartialRealization> positive_psi_lattice(
    const std::vector<ExplicitRow>& rows, int num_real) {
  std::vector<PartialRealization> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << num_real); ++mask) {
    std::vector<ItemId> items;
    for (ItemId e = 0; e < num_real; ++e)
      if (mask & (std::uint64_t{1} << e)) items.push_back(e);
    std::set<std::vector<int>> seen;
    for (const ExplicitRow& row : rows) {
      std::vector<int> states;
      states.reserve(items.size());
      for (ItemId e : items) states.push_back(row.phi.state_of(e));
      if (!seen.insert(states).second) continue;
      PartialRealization psi;
      for (size_t i = 0; i < items.size(); ++i) psi.observe(items[i], states[i]);
      out.push_back(std::move(psi));
    }
  }
  return out;
}

PartialRealization restrict_to(const PartialRealization& psi,
                               std::uint64_t mask) {
  PartialRealization out;
  for (const Observation& o : psi.canonical())
    if (mask & (std::uint64_t{1} << o.item)) out.observe(o.item, o.state);
  return out;
}

bool within_constraint(const Instance& inst, const Constraint& c,
                       const ItemSet& dom) {
  if (const auto* card = std::get_if<CardinalityConstraint>(&c))
    return dom.size() <= card->k;
  return inst.total_cost(dom) <=
         std::get<KnapsackConstraint>(c).budget + kBudgetSlack;
}

struct ViolationTracker {
  double worst = 0.0;
  CheckerWitness witness;
  bool any = false;

  void offer(double gap, const PartialRealization& psi,
             const PartialRealization& psi_prime, ItemId item) {
    if (gap <= worst && any) return;
    if (gap <= 0.0) return;
    worst = gap;
    witness = {psi.canonical(), psi_prime.canonical(), item};
    any = true;
  }

  CheckerReport report(std::string property, double tol,
                       long comparisons) const {
    CheckerReport rep;
    rep.property = std::move(property);
    rep.tolerance = tol;
    rep.comparisons = comparisons;
    rep.worst_violation = worst;
    rep.holds = worst <= tol;
    if (!rep.holds) rep.witness = witness;
    return rep;
  }
};

}  // namespace

double optimal_adaptive_value(const Instance& inst, const Constraint& c,
                              const OracleLimits& limits) {
  guard_size(inst, limits, "adaptive oracle");
  AdaptiveDp dp(inst, c, limits);
  return dp.value(PartialRealization{});
}

OracleReport optimal_adaptive_report(const Instance& inst, const Constraint& c,
                                     const OracleLimits& limits) {
  guard_size(inst, limits, "adaptive oracle");
  AdaptiveDp dp(inst, c, limits);
  PartialRealization root;

  OracleReport rep;
  rep.value = dp.value(root);
  rep.root_actions.push_back(
      {"stop", dp.eval().expected_value(ItemSet{}, root), false});
  for (ItemId e = 0; e < inst.num_real_items(); ++e) {
    if (!dp.can_select(root, e)) continue;
    rep.root_actions.push_back(
        {"select " + std::to_string(e), dp.action_value(root, e), false});
  }
  for (RootAction& a : rep.root_actions)
    if (std::abs(a.value - rep.value) <= 1e-12) {
      a.best = true;
      break;
    }
  return rep;
}

double optimal_adaptive_value_cardinality(const Instance& inst, int k,
                                          const OracleLimits& limits) {
  guard_size(inst, limits, "adaptive oracle");
  if (k < 0) throw ConfigError("cardinality oracle: negative k");
  ExactEvaluator eval(inst, limits.max_realizations);
  std::map<std::pair<std::vector<int>, int>, double> memo;

  // picks_left is carried explicitly instead of being derived from psi
  auto rec = [&](auto&& self, const PartialRealization& psi,
                 int picks_left) -> double {
    auto key = std::make_pair(psi_key(psi), picks_left);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    double best = eval.expected_value(psi.domain(), psi);
    if (picks_left > 0) {
      for (ItemId e = 0; e < inst.num_real_items(); ++e) {
        if (psi.contains(e)) continue;
        std::vector<double> dist = eval.state_distribution(e, psi);
        double v = 0.0;
        for (size_t s = 0; s < dist.size(); ++s) {
          if (dist[s] <= 0.0) continue;
          PartialRealization next = psi;
          next.observe(e, static_cast<int>(s));
          v += dist[s] * self(self, next, picks_left - 1);
        }
        best = std::max(best, v);
      }
    }
    memo.emplace(std::move(key), best);
    return best;
  };
  return rec(rec, PartialRealization{}, k);
}

CheckerReport check_adaptive_submodularity(const Instance& inst, double tol,
                                           const OracleLimits& limits) {
  guard_size(inst, limits, "submodularity check");
  ExactEvaluator eval(inst, limits.max_realizations);
  auto lattice = positive_psi_lattice(eval.rows(), inst.num_real_items());

  ViolationTracker tracker;
  long comparisons = 0;
  for (const PartialRealization& psi_prime : lattice) {
    std::uint64_t full = psi_prime.domain().mask();
    for (std::uint64_t sub = full;; sub = (sub - 1) & full) {
      PartialRealization psi = restrict_to(psi_prime, sub);
      for (ItemId e = 0; e < inst.num_real_items(); ++e) {
        if (psi_prime.contains(e)) continue;
        double early = eval.marginal(e, psi.domain(), psi);
        double late = eval.marginal(e, psi_prime.domain(), psi_prime);
        ++comparisons;
        tracker.offer(late - early, psi, psi_prime, e);
      }
      if (sub == 0) break;
    }
  }
  return tracker.report("adaptive_submodularity", tol, comparisons);
}

CheckerReport check_adaptive_monotonicity(const Instance& inst, double tol,
                                          const OracleLimits& limits) {
  guard_size(inst, limits, "monotonicity check");
  ExactEvaluator eval(inst, limits.max_realizations);
  auto lattice = positive_psi_lattice(eval.rows(), inst.num_real_items());

  ViolationTracker tracker;
  long comparisons = 0;
  for (const PartialRealization& psi : lattice) {
    for (ItemId e = 0; e < inst.num_real_items(); ++e) {
      if (psi.contains(e)) continue;
      double d = eval.marginal(e, psi.domain(), psi);
      ++comparisons;
      tracker.offer(-d, psi, psi, e);
    }
  }
  return tracker.report("adaptive_monotonicity", tol, comparisons);
}

CheckerReport check_weak_policywise(const Instance& inst, const Constraint& c,
                                    double tol, const OracleLimits& limits) {
  guard_size(inst, limits, "weak policywise check");
  AdaptiveDp dp(inst, c, limits);
  auto lattice =
      positive_psi_lattice(dp.eval().rows(), inst.num_real_items());
  double opt = dp.value(PartialRealization{});

  ViolationTracker tracker;
  long comparisons = 0;
  for (const PartialRealization& psi : lattice) {
    if (!within_constraint(inst, c, psi.domain())) continue;
    double continuation =
        dp.value(psi) - dp.eval().expected_value(psi.domain(), psi);
    ++comparisons;
    tracker.offer(continuation - opt, psi, psi, -1);
  }
  return tracker.report("weak_policywise_submodularity", tol, comparisons);
}

CheckerReport check_policywise_strong(const Instance& inst, const Constraint& c,
                                      double tol, const OracleLimits& limits) {
  guard_size(inst, limits, "strong policywise check");
  if (inst.num_real_items() > 5)
    throw EnumerationCapError(
        "strong policywise check is limited to 5 items");
  ExactEvaluator eval(inst, limits.max_realizations);
  auto lattice = positive_psi_lattice(eval.rows(), inst.num_real_items());

  bool cardinality = std::holds_alternative<CardinalityConstraint>(c);
  double budget = cardinality
                      ? static_cast<double>(std::get<CardinalityConstraint>(c).k)
                      : std::get<KnapsackConstraint>(c).budget;
  auto item_cost = [&](ItemId e) {
    return cardinality ? 1.0 : inst.cost(e);
  };

  // value of the best continuation from psi restricted to `allowed`
  std::map<std::tuple<std::vector<int>, std::uint64_t, std::uint64_t>, double>
      memo;
  auto rec = [&](auto&& self, const PartialRealization& psi,
                 std::uint64_t allowed, double left) -> double {
    std::uint64_t left_bits;
    static_assert(sizeof(left_bits) == sizeof(left));
    std::memcpy(&left_bits, &left, sizeof(left));
    auto key = std::make_tuple(psi_key(psi), allowed, left_bits);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    double best = eval.expected_value(psi.domain(), psi);
    for (ItemId e = 0; e < inst.num_real_items(); ++e) {
      if (psi.contains(e)) continue;
      if (!(allowed & (std::uint64_t{1} << e))) continue;
      if (item_cost(e) > left + kBudgetSlack) continue;
      std::vector<double> dist = eval.state_distribution(e, psi);
      double v = 0.0;
      for (size_t s = 0; s < dist.size(); ++s) {
        if (dist[s] <= 0.0) continue;
        PartialRealization next = psi;
        next.observe(e, static_cast<int>(s));
        v += dist[s] * self(self, next, allowed, left - item_cost(e));
      }
      best = std::max(best, v);
    }
    memo.emplace(std::move(key), best);
    return best;
  };

  ViolationTracker tracker;
  long comparisons = 0;
  std::uint64_t real_mask = inst.real_items().mask();
  for (const PartialRealization& psi_prime : lattice) {
    if (!within_constraint(inst, c, psi_prime.domain())) continue;
    double dom_cost = 0.0;
    for (ItemId e : psi_prime.domain().to_vector()) dom_cost += item_cost(e);
    double residual = budget - dom_cost;
    std::uint64_t full = psi_prime.domain().mask();
    std::uint64_t outside = real_mask & ~full;

    for (std::uint64_t s_mask = outside;; s_mask = (s_mask - 1) & outside) {
      double from_prime = rec(rec, psi_prime, s_mask, residual) -
                          eval.expected_value(psi_prime.domain(), psi_prime);
      for (std::uint64_t sub = full;; sub = (sub - 1) & full) {
        PartialRealization psi = restrict_to(psi_prime, sub);
        double from_sub = rec(rec, psi, s_mask, residual) -
                          eval.expected_value(psi.domain(), psi);
        ++comparisons;
        tracker.offer(from_prime - from_sub, psi, psi_prime, -1);
        if (sub == 0) break;
      }
      if (s_mask == 0) break;
    }
  }
  return tracker.report("policywise_submodularity", tol, comparisons);
}

}  // namespace pasm
