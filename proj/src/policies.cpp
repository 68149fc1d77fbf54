#include "pasm/policies.hpp"

#include <algorithm>
#include <cmath>

namespace pasm {

namespace {

// Absorbs float creep in running cost sums without admitting items that
// genuinely exceed the budget at test tolerances.
constexpr double kBudgetSlack = 1e-12;

struct TraceAssembler {
  RunTrace tr;

  void select_into_batch(int batch, ItemId e) {
    while (static_cast<int>(tr.batches.size()) < batch) tr.batches.push_back({});
    tr.batches[static_cast<size_t>(batch - 1)].items.push_back(e);
    tr.selected.add(e);
    tr.selection_order.push_back(e);
    tr.batch_count = static_cast<int>(tr.batches.size());
  }

  void record_close(int batch, std::vector<Observation> obs) {
    if (static_cast<int>(tr.batches.size()) >= batch)
      tr.batches[static_cast<size_t>(batch - 1)].observed = std::move(obs);
  }

  void iteration(int t, int batch, ItemId e, bool stayed, double lhs,
                 double rhs) {
    tr.iterations.push_back({t, batch, e, stayed, lhs, rhs});
  }

  RunTrace finish(TerminationReason r) {
    tr.reason = r;
    return std::move(tr);
  }
};

std::vector<Observation> reveal_batch(PolicyContext& ctx,
                                      const std::vector<ItemId>& items,
                                      PartialRealization& psi) {
  std::vector<int> states = ctx.reveal(items);
  std::vector<Observation> obs;
  obs.reserve(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    psi.observe(items[i], states[i]);
    obs.push_back({items[i], states[i]});
  }
  return obs;
}

std::pair<ItemId, double> argmax_density(MarginalEngine& eng,
                                         const ItemSet& candidates,
                                         const ItemSet& base,
                                         const PartialRealization& psi) {
  ItemId best = -1;
  double best_density = -std::numeric_limits<double>::infinity();
  for (ItemId e : candidates.to_vector()) {
    double d = eng.marginal(e, base, psi) / eng.instance().cost(e);
    if (d > best_density) {
      best_density = d;
      best = e;
    }
  }
  return {best, best_density};
}

}  // namespace

std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::BudgetExhausted: return "BudgetExhausted";
    case TerminationReason::CardinalityReached: return "CardinalityReached";
    case TerminationReason::NoPositiveDensity: return "NoPositiveDensity";
    case TerminationReason::GroundExhausted: return "GroundExhausted";
    case TerminationReason::TruncatedAtT: return "TruncatedAtT";
  }
  return "?";
}

ItemSet top_k_set(MarginalEngine& engine, const ItemSet& selected,
                  const PartialRealization& psi, int k) {
  const Instance& inst = engine.instance();
  std::vector<std::pair<double, ItemId>> scored;
  scored.reserve(static_cast<size_t>(inst.num_items()));
  for (ItemId e = 0; e < inst.num_items(); ++e) {
    if (selected.contains(e)) continue;
    scored.emplace_back(engine.marginal(e, selected, psi), e);
  }
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) {
              if (a.first != b.first) return a.first > b.first;
              return a.second < b.second;
            });
  ItemSet m;
  for (int i = 0; i < k && i < static_cast<int>(scored.size()); ++i)
    m.add(scored[static_cast<size_t>(i)].second);
  return m;
}

double marginal_sum(MarginalEngine& engine, const ItemSet& m,
                    const ItemSet& selected, const PartialRealization& psi) {
  double sum = 0.0;
  for (ItemId e : m.to_vector()) sum += engine.marginal(e, selected, psi);
  return sum;
}

std::pair<ItemId, double> best_singleton(const Instance& inst,
                                         std::optional<double> budget) {
  ExactEvaluator eval(inst);
  PartialRealization empty;
  ItemId best = -1;
  double best_value = -std::numeric_limits<double>::infinity();
  for (ItemId e = 0; e < inst.num_real_items(); ++e) {
    if (budget && inst.cost(e) > *budget + kBudgetSlack) continue;
    double v = eval.expected_value(ItemSet::of({e}), empty);
    if (v > best_value) {
      best_value = v;
      best = e;
    }
  }
  if (best < 0)
    throw ConfigError("best_singleton: no item fits the budget");
  return {best, best_value};
}

MixtureWeights mixture_weights(double alpha) {
  if (!(alpha > 0.0) || alpha > 1.0)
    throw ConfigError("mixture weights need alpha in (0, 1]");
  double denom = 3.0 + 2.0 / alpha;
  return {(1.0 / alpha) / denom, (3.0 + 1.0 / alpha) / denom};
}

BatchBudget batch_budget_T(int n, double budget, double min_cost,
                           double alpha) {
  if (n < 1) throw ConfigError("batch budget: need at least one item");
  if (!(min_cost > 0.0) || budget < min_cost)
    throw ConfigError("batch budget: need 0 < min_cost <= budget");
  if (alpha < 0.0 || alpha >= 1.0)
    throw ConfigError("batch budget: alpha must lie in [0, 1)");

  // ceil that forgives float error just below an integer
  auto iceil = [](double x) {
    return static_cast<int>(std::ceil(x - 1e-12));
  };

  double base = 2.0 / (1.0 + alpha);
  double log_base = std::log(base);
  double inner = std::log(budget / (min_cost * (1.0 - alpha))) / log_base;
  if (inner <= 1e-12) {
    // budget equals min_cost at alpha = 0: no room for more than the
    // trivial single batch, the closed form degenerates
    return {0, std::numeric_limits<double>::infinity(), true};
  }
  double delta = (1.0 - alpha) / inner;
  int t = iceil(std::log(static_cast<double>(n) / delta) / log_base) *
          iceil(inner);
  return {t, delta, false};
}

PartialAdaptiveGreedy::PartialAdaptiveGreedy(
    std::shared_ptr<const Instance> base, double alpha, int k,
    MarginalMode mode)
    : base_(std::move(base)), alpha_(alpha), k_(k), mode_(mode) {
  if (alpha_ < 0.0 || alpha_ > 1.0)
    throw ConfigError("pa-greedy: alpha must lie in [0, 1]");
  if (k_ < 1 || k_ > base_->num_real_items())
    throw ConfigError("pa-greedy: need 1 <= k <= number of items");
  exec_ = std::make_shared<const Instance>(base_->with_dummy_items(2 * k_ - 1));
}

RunTrace PartialAdaptiveGreedy::run(PolicyContext& ctx) const {
  auto shared = mode_.kind == MarginalMode::Kind::Exact ? ctx.shared_exact()
                                                        : nullptr;
  MarginalEngine eng(*exec_, mode_, std::move(shared), ctx.rng());
  TraceAssembler ta;
  PartialRealization psi;  // states of all closed batches
  ItemSet sel;
  std::vector<ItemId> open_items;
  int batch = 1;
  TerminationReason reason = TerminationReason::CardinalityReached;

  for (int t = 1; t <= k_; ++t) {
    ItemSet m_stale = top_k_set(eng, sel, psi, k_);
    double lhs = marginal_sum(eng, m_stale, sel, psi);
    ItemSet m_fresh = top_k_set(eng, psi.domain(), psi, k_);
    double rhs = alpha_ * marginal_sum(eng, m_fresh, psi.domain(), psi);
    bool stayed = lhs >= rhs;

    ItemSet m_pick = m_stale;
    if (!stayed) {
      if (!ctx.open_batch()) {
        reason = TerminationReason::TruncatedAtT;
        break;
      }
      ta.record_close(batch, reveal_batch(ctx, open_items, psi));
      ++batch;
      open_items.clear();
      m_pick = top_k_set(eng, sel, psi, k_);
    }

    std::vector<ItemId> cand = m_pick.to_vector();
    std::vector<double> w(cand.size(), 1.0 / static_cast<double>(cand.size()));
    ItemId e = cand[static_cast<size_t>(ctx.choose(w))];
    if (!ctx.select(e)) {
      reason = TerminationReason::CardinalityReached;
      break;
    }
    sel.add(e);
    open_items.push_back(e);
    ta.select_into_batch(batch, e);
    ta.iteration(t, batch, e, stayed, lhs, rhs);
  }
  return ta.finish(reason);
}

DensityGreedy::DensityGreedy(std::shared_ptr<const Instance> base, double alpha,
                             double budget, MarginalMode mode)
    : base_(std::move(base)), alpha_(alpha), budget_(budget), mode_(mode) {
  if (alpha_ < 0.0 || alpha_ > 1.0)
    throw ConfigError("density-greedy: alpha must lie in [0, 1]");
  for (ItemId e = 0; e < base_->num_real_items(); ++e)
    if (!(base_->cost(e) > 0.0))
      throw ConfigError("density-greedy: item costs must be strictly positive");
  if (budget_ < base_->min_real_cost())
    throw ConfigError("density-greedy: budget below the cheapest item");
}

RunTrace DensityGreedy::run(PolicyContext& ctx) const {
  const Instance& inst = *base_;
  auto shared = mode_.kind == MarginalMode::Kind::Exact ? ctx.shared_exact()
                                                        : nullptr;
  MarginalEngine eng(inst, mode_, std::move(shared), ctx.rng());
  TraceAssembler ta;

  // candidate pool: keep each item independently with probability 1/2
  ItemSet pool;
  const double half[2] = {0.5, 0.5};
  for (ItemId e = 0; e < inst.num_real_items(); ++e)
    if (ctx.choose(half) == 0) pool.add(e);
  ta.tr.sampled_pool = pool;
  ta.tr.used_sampled_pool = true;

  PartialRealization psi;
  ItemSet sel;
  std::vector<ItemId> open_items;
  double spent = 0.0;
  double opener_density = 0.0;  // density the current batch's first item
                                // had when the batch opened
  int batch = 1;
  int t = 1;
  TerminationReason reason = TerminationReason::GroundExhausted;

  while (!pool.minus(sel).empty()) {
    auto [cur, cur_density] = argmax_density(eng, pool.minus(sel), sel, psi);
    if (t == 1) opener_density = cur_density;

    if (cur_density >= alpha_ * opener_density) {
      if (spent + inst.cost(cur) > budget_ + kBudgetSlack) {
        reason = TerminationReason::BudgetExhausted;
        break;
      }
      if (!ctx.select(cur)) {
        reason = TerminationReason::CardinalityReached;
        break;
      }
      sel.add(cur);
      spent += inst.cost(cur);
      open_items.push_back(cur);
      ta.select_into_batch(batch, cur);
      ta.iteration(t, batch, cur, true, cur_density, alpha_ * opener_density);
      ++t;
      continue;
    }

    if (!ctx.open_batch()) {
      reason = TerminationReason::TruncatedAtT;
      break;
    }
    ta.record_close(batch, reveal_batch(ctx, open_items, psi));
    ++batch;
    open_items.clear();
    auto [nxt, nxt_density] =
        argmax_density(eng, pool.minus(psi.domain()), psi.domain(), psi);
    if (!(nxt_density > 0.0)) {
      reason = TerminationReason::NoPositiveDensity;
      break;
    }
    if (spent + inst.cost(nxt) > budget_ + kBudgetSlack) {
      reason = TerminationReason::BudgetExhausted;
      break;
    }
    if (!ctx.select(nxt)) {
      reason = TerminationReason::CardinalityReached;
      break;
    }
    opener_density = nxt_density;
    sel.add(nxt);
    spent += inst.cost(nxt);
    open_items.push_back(nxt);
    ta.select_into_batch(batch, nxt);
    ta.iteration(t, batch, nxt, false, nxt_density, alpha_ * nxt_density);
    ++t;
  }
  return ta.finish(reason);
}

BestSingletonPolicy::BestSingletonPolicy(std::shared_ptr<const Instance> base,
                                         std::optional<double> budget)
    : base_(std::move(base)) {
  item_ = best_singleton(*base_, budget).first;
}

RunTrace BestSingletonPolicy::run(PolicyContext& ctx) const {
  TraceAssembler ta;
  if (ctx.select(item_)) ta.select_into_batch(1, item_);
  return ta.finish(TerminationReason::CardinalityReached);
}

MixedKnapsackPolicy::MixedKnapsackPolicy(std::shared_ptr<const Instance> base,
                                         double alpha, double budget,
                                         MarginalMode mode)
    : base_(base),
      weights_(mixture_weights(alpha)),
      singleton_(base, budget),
      density_(base, alpha, budget, mode) {}

RunTrace MixedKnapsackPolicy::run(PolicyContext& ctx) const {
  const double w[2] = {weights_.singleton, weights_.density};
  if (ctx.choose(w) == 0) return singleton_.run(ctx);
  return density_.run(ctx);
}

FixedSetPolicy::FixedSetPolicy(std::shared_ptr<const Instance> base,
                               std::vector<ItemId> items)
    : base_(std::move(base)), items_(std::move(items)) {
  for (ItemId e : items_)
    if (e < 0 || e >= base_->num_items())
      throw ConfigError("fixed-set: unknown item id " + std::to_string(e));
}

RunTrace FixedSetPolicy::run(PolicyContext& ctx) const {
  TraceAssembler ta;
  for (ItemId e : items_) {
    if (!ctx.select(e)) break;
    ta.select_into_batch(1, e);
  }
  return ta.finish(TerminationReason::GroundExhausted);
}

namespace {

class CappingContext final : public PolicyContext {
 public:
  CappingContext(PolicyContext& inner, std::optional<int> max_batches,
                 std::optional<int> max_selections)
      : inner_(inner),
        max_batches_(max_batches),
        max_selections_(max_selections) {}

  int choose(std::span<const double> w) override { return inner_.choose(w); }
  std::vector<int> reveal(std::span<const ItemId> items) override {
    return inner_.reveal(items);
  }
  std::mt19937_64* rng() override { return inner_.rng(); }
  std::shared_ptr<ExactEvaluator> shared_exact() override {
    return inner_.shared_exact();
  }

  bool select(ItemId e) override {
    if (max_selections_ && selections_ >= *max_selections_) {
      selection_tripped_ = true;
      return false;
    }
    if (!inner_.select(e)) return false;
    ++selections_;
    return true;
  }

  bool open_batch() override {
    if (max_batches_ && batches_ >= *max_batches_) {
      batch_tripped_ = true;
      return false;
    }
    if (!inner_.open_batch()) return false;
    ++batches_;
    return true;
  }

  bool batch_tripped() const { return batch_tripped_; }
  bool selection_tripped() const { return selection_tripped_; }

 private:
  PolicyContext& inner_;
  std::optional<int> max_batches_;
  std::optional<int> max_selections_;
  int batches_ = 1;  // batch 1 is open from the start
  int selections_ = 0;
  bool batch_tripped_ = false;
  bool selection_tripped_ = false;
};

class CappedPolicy final : public Policy {
 public:
  CappedPolicy(PolicyPtr inner, std::optional<int> max_batches,
               std::optional<int> max_selections, std::string label)
      : inner_(std::move(inner)),
        max_batches_(max_batches),
        max_selections_(max_selections),
        label_(std::move(label)) {}

  const Instance& instance() const override { return inner_->instance(); }

  RunTrace run(PolicyContext& ctx) const override {
    CappingContext capped(ctx, max_batches_, max_selections_);
    RunTrace tr = inner_->run(capped);
    if (capped.batch_tripped())
      tr.reason = TerminationReason::TruncatedAtT;
    else if (capped.selection_tripped())
      tr.reason = TerminationReason::CardinalityReached;
    return tr;
  }

  std::string name() const override { return label_; }

 private:
  PolicyPtr inner_;
  std::optional<int> max_batches_;
  std::optional<int> max_selections_;
  std::string label_;
};

class ConcatenatedPolicy final : public Policy {
 public:
  ConcatenatedPolicy(PolicyPtr first, PolicyPtr second)
      : first_(std::move(first)), second_(std::move(second)) {
    if (first_->instance().num_items() != second_->instance().num_items())
      throw ConfigError("concatenate: policies run over different instances");
  }

  const Instance& instance() const override { return first_->instance(); }

  RunTrace run(PolicyContext& ctx) const override {
    RunTrace a = first_->run(ctx);
    RunTrace b = second_->run(ctx);
    RunTrace out = a;
    int t0 = static_cast<int>(a.selection_order.size());
    int b0 = out.batch_count;
    for (const BatchRecord& br : b.batches) out.batches.push_back(br);
    for (ItemId e : b.selection_order) {
      if (out.selected.contains(e)) continue;  // reselection adds nothing
      out.selected.add(e);
      out.selection_order.push_back(e);
    }
    out.batch_count = a.batch_count + b.batch_count;
    for (IterationRecord rec : b.iterations) {
      rec.t += t0;
      rec.batch += b0;
      out.iterations.push_back(rec);
    }
    out.sampled_pool = a.sampled_pool.unite(b.sampled_pool);
    out.used_sampled_pool = a.used_sampled_pool || b.used_sampled_pool;
    out.reason = b.reason;
    return out;
  }

  std::string name() const override {
    return first_->name() + "@" + second_->name();
  }

 private:
  PolicyPtr first_;
  PolicyPtr second_;
};

}  // namespace

PolicyPtr concatenate(PolicyPtr first, PolicyPtr second) {
  return std::make_shared<ConcatenatedPolicy>(std::move(first),
                                              std::move(second));
}

PolicyPtr level_truncate(PolicyPtr inner, int level) {
  if (level < 0) throw ConfigError("level_truncate: negative level");
  std::string label = inner->name() + "[level<=" + std::to_string(level) + "]";
  return std::make_shared<CappedPolicy>(std::move(inner), std::nullopt, level,
                                        std::move(label));
}

PolicyPtr truncate_batches(PolicyPtr inner, int max_batches) {
  if (max_batches < 1)
    throw ConfigError("truncate_batches: need at least one batch");
  std::string label =
      inner->name() + "[batches<=" + std::to_string(max_batches) + "]";
  return std::make_shared<CappedPolicy>(std::move(inner), max_batches,
                                        std::nullopt, std::move(label));
}

}  // namespace pasm
