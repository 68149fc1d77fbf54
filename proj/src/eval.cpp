#include "pasm/eval.hpp"

#include <cmath>

namespace pasm {

namespace {

int pick_from_weights(std::span<const double> weights, double u) {
  double acc = 0.0;
  int last_positive = -1;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    acc += weights[i];
    if (u < acc) return last_positive;
  }
  if (last_positive < 0)
    throw ModelError("draw from a weight vector with no positive entry");
  return last_positive;
}

/** Builds the shared evaluator the first time a policy asks for it, so
 *  sampling-only policies never pay for prior enumeration. */
class LazySharedExact {
 public:
  explicit LazySharedExact(const Instance& inst) : inst_(inst) {}

  std::shared_ptr<ExactEvaluator> get() {
    if (!cached_) cached_ = std::make_shared<ExactEvaluator>(inst_);
    return cached_;
  }

 private:
  const Instance& inst_;
  std::shared_ptr<ExactEvaluator> cached_;
};

class SimulationContext final : public PolicyContext {
 public:
  SimulationContext(const Realization& phi, std::mt19937_64& rng,
                    LazySharedExact* shared)
      : phi_(phi), rng_(rng), shared_(shared) {}

  int choose(std::span<const double> weights) override {
    return pick_from_weights(weights, uniform_unit(rng_));
  }

  std::vector<int> reveal(std::span<const ItemId> items) override {
    std::vector<int> states;
    states.reserve(items.size());
    for (ItemId e : items) states.push_back(phi_.state_of(e));
    return states;
  }

  std::mt19937_64* rng() override { return &rng_; }
  std::shared_ptr<ExactEvaluator> shared_exact() override {
    return shared_ ? shared_->get() : nullptr;
  }

 private:
  const Realization& phi_;
  std::mt19937_64& rng_;
  LazySharedExact* shared_;
};

/**
 * Depth-first walk over every random event of a policy run. Each run
 * replays the recorded prefix of choices and extends it with
 * first-positive branches; advance() then flips the deepest choice that
 * still has an unexplored positive branch.
 */
class PathEnumerator {
 public:
  int take(std::vector<double> weights) {
    if (cursor_ < path_.size()) {
      const Choice& c = path_[cursor_];
      if (c.weights.size() != weights.size())
        throw ModelError("policy run is not deterministic under replay");
      ++cursor_;
      return c.taken;
    }
    int first = next_positive(weights, -1);
    if (first < 0)
      throw ModelError("draw from a weight vector with no positive entry");
    path_.push_back({std::move(weights), first});
    ++cursor_;
    return first;
  }

  bool advance() {
    while (!path_.empty()) {
      Choice& c = path_.back();
      int nxt = next_positive(c.weights, c.taken);
      if (nxt >= 0) {
        c.taken = nxt;
        cursor_ = 0;
        return true;
      }
      path_.pop_back();
    }
    return false;
  }

  double weight() const {
    double w = 1.0;
    for (const Choice& c : path_) w *= c.weights[static_cast<size_t>(c.taken)];
    return w;
  }

 private:
  struct Choice {
    std::vector<double> weights;
    int taken;
  };

  static int next_positive(const std::vector<double>& w, int after) {
    for (size_t i = static_cast<size_t>(after + 1); i < w.size(); ++i)
      if (w[i] > 0.0) return static_cast<int>(i);
    return -1;
  }

  std::vector<Choice> path_;
  size_t cursor_ = 0;
};

class EnumerationContext final : public PolicyContext {
 public:
  EnumerationContext(PathEnumerator& path, std::shared_ptr<ExactEvaluator> exact,
                     PartialRealization initial_psi)
      : path_(path), exact_(std::move(exact)), psi_(std::move(initial_psi)) {}

  int choose(std::span<const double> weights) override {
    return path_.take({weights.begin(), weights.end()});
  }

  std::vector<int> reveal(std::span<const ItemId> items) override {
    std::vector<int> states;
    states.reserve(items.size());
    for (ItemId e : items) {
      // chain rule: branch on this item's conditional state distribution
      std::vector<double> dist = exact_->state_distribution(e, psi_);
      int s = path_.take(std::move(dist));
      psi_.observe(e, s);
      states.push_back(s);
    }
    return states;
  }

  std::shared_ptr<ExactEvaluator> shared_exact() override { return exact_; }

  const PartialRealization& observed() const { return psi_; }

 private:
  PathEnumerator& path_;
  std::shared_ptr<ExactEvaluator> exact_;
  PartialRealization psi_;
};

}  // namespace

RunTrace simulate_run(const Policy& policy, const Realization& phi,
                      std::mt19937_64& rng) {
  LazySharedExact shared(policy.instance());
  SimulationContext ctx(phi, rng, &shared);
  RunTrace tr = policy.run(ctx);
  tr.realized_utility = policy.instance().utility_value(tr.selected, phi);
  return tr;
}

EvalReport exact_expected_utility(
    const Policy& policy,
    const std::function<void(const RunTrace&, double)>& on_leaf,
    long leaf_cap) {
  auto exact = std::make_shared<ExactEvaluator>(policy.instance());
  PathEnumerator path;
  double total = 0.0;
  double weight_sum = 0.0;
  double batch_mean = 0.0;
  int max_batches = 0;
  long leaves = 0;

  for (;;) {
    EnumerationContext ctx(path, exact, PartialRealization{});
    RunTrace tr = policy.run(ctx);
    double w = path.weight();
    tr.realized_utility = exact->expected_value(tr.selected, ctx.observed());
    total += w * tr.realized_utility;
    weight_sum += w;
    batch_mean += w * tr.batch_count;
    max_batches = std::max(max_batches, tr.batch_count);
    if (on_leaf) on_leaf(tr, w);
    if (++leaves > leaf_cap)
      throw EnumerationCapError("policy tree exceeds " +
                                std::to_string(leaf_cap) + " leaves");
    if (!path.advance()) break;
  }

  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw ModelError("internal: path probabilities sum to " +
                     std::to_string(weight_sum));

  EvalReport rep;
  rep.expected_utility = total;
  rep.std_error = 0.0;
  rep.mean_batches = batch_mean;
  rep.max_batches = max_batches;
  rep.trials = leaves;
  rep.method = "exact";
  return rep;
}

EvalReport mc_expected_utility(const Policy& policy, long trials,
                               std::uint64_t seed) {
  if (trials <= 0) throw ConfigError("mc_expected_utility: trials must be > 0");
  const Instance& inst = policy.instance();
  std::mt19937_64 rng(seed);
  // shared across trials so conditional caches survive between runs
  LazySharedExact shared(inst);
  double sum = 0.0, sum_sq = 0.0, batches = 0.0;
  int max_batches = 0;
  PartialRealization empty;

  for (long i = 0; i < trials; ++i) {
    Realization phi = sample_realization(inst.prior(), empty, rng);
    SimulationContext ctx(phi, rng, &shared);
    RunTrace tr = policy.run(ctx);
    double u = inst.utility_value(tr.selected, phi);
    sum += u;
    sum_sq += u * u;
    batches += tr.batch_count;
    max_batches = std::max(max_batches, tr.batch_count);
  }

  EvalReport rep;
  double n = static_cast<double>(trials);
  rep.expected_utility = sum / n;
  double var = (sum_sq - sum * sum / n) / std::max(1.0, n - 1.0);
  rep.std_error = std::sqrt(std::max(0.0, var) / n);
  rep.mean_batches = batches / n;
  rep.max_batches = max_batches;
  rep.trials = trials;
  rep.method = "mc";
  return rep;
}

double marginal_policy(const Policy& policy, const ItemSet& selected,
                       const PartialRealization& psi) {
  auto exact = std::make_shared<ExactEvaluator>(policy.instance());
  PathEnumerator path;
  double total = 0.0;
  double weight_sum = 0.0;

  for (;;) {
    EnumerationContext ctx(path, exact, psi);
    RunTrace tr = policy.run(ctx);
    double w = path.weight();
    total +=
        w * exact->expected_value(selected.unite(tr.selected), ctx.observed());
    weight_sum += w;
    if (!path.advance()) break;
  }

  if (std::abs(weight_sum - 1.0) > 1e-9)
    throw ModelError("internal: path probabilities sum to " +
                     std::to_string(weight_sum));
  return total - exact->expected_value(selected, psi);
}

}  // namespace pasm
