#include "pasm/marginals.hpp"

namespace pasm {

ExactEvaluator::ExactEvaluator(const Instance& inst, long cap) : inst_(inst) {
  rows_ = enumerate_realizations(inst.prior(), cap);
}

ExactEvaluator::PsiKey ExactEvaluator::key_of(const PartialRealization& psi) {
  PsiKey key;
  key.reserve(static_cast<size_t>(psi.size()) * 2);
  for (const Observation& o : psi.canonical()) {
    key.push_back(o.item);
    key.push_back(o.state);
  }
  return key;
}

const ExactEvaluator::Conditional& ExactEvaluator::conditional(
    const PartialRealization& psi) {
  PsiKey key = key_of(psi);
  auto it = cond_cache_.find(key);
  if (it != cond_cache_.end()) return it->second;

  Conditional c;
  for (size_t i = 0; i < rows_.size(); ++i) {
    if (is_consistent(rows_[i].phi, psi)) {
      c.row_idx.push_back(static_cast<int>(i));
      c.probs.push_back(rows_[i].p);
      c.z += rows_[i].p;
    }
  }
  if (c.row_idx.empty() || c.z <= 0.0)
    throw ConditioningError(
        "conditioning on a zero-probability partial realization");
  for (double& p : c.probs) p /= c.z;
  return cond_cache_.emplace(std::move(key), std::move(c)).first->second;
}

double ExactEvaluator::expected_value(const ItemSet& selected,
                                      const PartialRealization& psi) {
  auto key = std::make_pair(key_of(psi), selected.mask());
  auto it = value_cache_.find(key);
  if (it != value_cache_.end()) return it->second;

  const Conditional& c = conditional(psi);
  double v = 0.0;
  for (size_t i = 0; i < c.row_idx.size(); ++i)
    v += c.probs[i] *
         inst_.utility_value(selected, rows_[static_cast<size_t>(c.row_idx[i])].phi);
  value_cache_.emplace(std::move(key), v);
  return v;
}

double ExactEvaluator::marginal(ItemId e, const ItemSet& selected,
                                const PartialRealization& psi) {
  if (selected.contains(e)) return 0.0;
  return expected_value(selected.with(e), psi) - expected_value(selected, psi);
}

std::vector<double> ExactEvaluator::state_distribution(
    ItemId e, const PartialRealization& psi) {
  std::vector<double> dist(static_cast<size_t>(inst_.num_states(e)), 0.0);
  if (psi.contains(e)) {
    dist.at(static_cast<size_t>(psi.state_of(e))) = 1.0;
    return dist;
  }
  const Conditional& c = conditional(psi);
  for (size_t i = 0; i < c.row_idx.size(); ++i) {
    int s = rows_[static_cast<size_t>(c.row_idx[i])].phi.state_of(e);
    dist.at(static_cast<size_t>(s)) += c.probs[i];
  }
  return dist;
}

double ExactEvaluator::probability(const PartialRealization& psi) {
  double z = 0.0;
  for (const ExplicitRow& r : rows_)
    if (is_consistent(r.phi, psi)) z += r.p;
  return z;
}

MarginalEngine::MarginalEngine(const Instance& inst, MarginalMode mode,
                               std::shared_ptr<ExactEvaluator> shared_exact,
                               std::mt19937_64* rng)
    : inst_(inst), mode_(mode), exact_(std::move(shared_exact)), rng_(rng) {
  if (exact_ && &exact_->instance() != &inst_)
    throw ConfigError("marginal engine: shared evaluator bound to a "
                      "different instance");
}

ExactEvaluator& MarginalEngine::exact() {
  if (!exact_) exact_ = std::make_shared<ExactEvaluator>(inst_);
  return *exact_;
}

double MarginalEngine::marginal(ItemId e, const ItemSet& selected,
                                const PartialRealization& psi) {
  if (selected.contains(e)) return 0.0;
  if (mode_.kind == MarginalMode::Kind::Exact)
    return exact().marginal(e, selected, psi);
  if (rng_ == nullptr)
    throw ConfigError("monte-carlo marginals need a random stream");
  double acc = 0.0;
  for (long i = 0; i < mode_.samples; ++i) {
    Realization phi = sample_realization(inst_.prior(), psi, *rng_);
    acc += inst_.utility_value(selected.with(e), phi) -
           inst_.utility_value(selected, phi);
  }
  return acc / static_cast<double>(mode_.samples);
}

double MarginalEngine::expected_value(const ItemSet& selected,
                                      const PartialRealization& psi) {
  if (mode_.kind == MarginalMode::Kind::Exact)
    return exact().expected_value(selected, psi);
  if (rng_ == nullptr)
    throw ConfigError("monte-carlo marginals need a random stream");
  double acc = 0.0;
  for (long i = 0; i < mode_.samples; ++i) {
    Realization phi = sample_realization(inst_.prior(), psi, *rng_);
    acc += inst_.utility_value(selected, phi);
  }
  return acc / static_cast<double>(mode_.samples);
}

double marginal_item(const Instance& inst, ItemId e, const ItemSet& selected,
                     const PartialRealization& psi, MarginalMode mode,
                     std::mt19937_64* rng) {
  MarginalEngine engine(inst, mode, nullptr, rng);
  return engine.marginal(e, selected, psi);
}

}  // namespace pasm
