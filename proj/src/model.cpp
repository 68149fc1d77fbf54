#include "pasm/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace pasm {

namespace {
constexpr double kProbTol = 1e-9;
}

std::string constraint_label(const Constraint& c) {
  if (const auto* card = std::get_if<CardinalityConstraint>(&c))
    return "k=" + std::to_string(card->k);
  std::ostringstream os;
  os << "B=" << std::get<KnapsackConstraint>(c).budget;
  return os.str();
}

Prior Prior::independent(std::vector<std::vector<double>> probs) {
  Prior p;
  p.kind_ = Kind::Independent;
  for (size_t i = 0; i < probs.size(); ++i) {
    const auto& row = probs[i];
    if (row.empty())
      throw ModelError("prior: item " + std::to_string(i) + " has no states");
    double sum = 0.0;
    for (double q : row) {
      if (q < 0.0)
        throw ModelError("prior: negative probability for item " +
                         std::to_string(i));
      sum += q;
    }
    if (std::abs(sum - 1.0) > kProbTol)
      throw ModelError("prior: probabilities for item " + std::to_string(i) +
                       " sum to " + std::to_string(sum));
  }
  p.probs_ = std::move(probs);
  return p;
}

Prior Prior::explicit_rows(std::vector<ExplicitRow> rows) {
  Prior p;
  p.kind_ = Kind::Explicit;
  if (rows.empty()) throw ModelError("prior: empty realization table");
  size_t n = rows[0].phi.states().size();
  double sum = 0.0;
  std::set<std::vector<int>> seen;
  for (const ExplicitRow& r : rows) {
    if (r.phi.states().size() != n)
      throw ModelError("prior: realization rows have mixed lengths");
    if (r.p < 0.0) throw ModelError("prior: negative realization probability");
    if (!seen.insert(r.phi.states()).second)
      throw ModelError("prior: duplicate realization row");
    sum += r.p;
  }
  if (std::abs(sum - 1.0) > kProbTol)
    throw ModelError("prior: realization probabilities sum to " +
                     std::to_string(sum));
  p.rows_ = std::move(rows);
  return p;
}

int Prior::num_items() const {
  if (kind_ == Kind::Independent) return static_cast<int>(probs_.size());
  return static_cast<int>(rows_[0].phi.states().size());
}

const std::vector<std::vector<double>>& Prior::marginals() const {
  if (kind_ != Kind::Independent)
    throw ModelError("marginals() requires an independent prior");
  return probs_;
}

const std::vector<ExplicitRow>& Prior::rows() const {
  if (kind_ != Kind::Explicit)
    throw ModelError("rows() requires an explicit prior");
  return rows_;
}

Instance::Instance(std::string id, StateSpace states, CostFunction costs,
                   Prior prior, UtilityFunction utility, int num_real)
    : id_(std::move(id)),
      states_(std::move(states)),
      costs_(std::move(costs)),
      prior_(std::move(prior)),
      utility_(std::move(utility)),
      num_real_(num_real) {
  int n = states_.num_items();
  if (n <= 0 || num_real_ <= 0 || num_real_ > n)
    throw ModelError("instance: bad item counts");
  if (n > ItemSet::max_items)
    throw ModelError("instance: more than " +
                     std::to_string(ItemSet::max_items) + " items");
  if (static_cast<int>(costs_.costs.size()) != n)
    throw ModelError("instance: cost vector length mismatch");
  if (prior_.num_items() != n)
    throw ModelError("instance: prior covers wrong number of items");
  for (ItemId e = 0; e < n; ++e) {
    if (states_.num_states(e) < 1)
      throw ModelError("instance: item " + std::to_string(e) + " has no states");
    if (costs_.cost(e) < 0.0)
      throw ModelError("instance: negative cost for item " + std::to_string(e));
    if (is_dummy(e)) {
      if (states_.num_states(e) != 1 || costs_.cost(e) != 0.0)
        throw ModelError("instance: dummy items must have one state and zero cost");
    }
  }
  if (prior_.kind() == Prior::Kind::Independent) {
    const auto& probs = prior_.marginals();
    for (ItemId e = 0; e < n; ++e)
      if (static_cast<int>(probs[static_cast<size_t>(e)].size()) !=
          states_.num_states(e))
        throw ModelError("instance: prior state count mismatch at item " +
                         std::to_string(e));
  } else {
    for (const ExplicitRow& r : prior_.rows())
      for (ItemId e = 0; e < n; ++e) {
        int s = r.phi.state_of(e);
        if (s < 0 || s >= states_.num_states(e))
          throw ModelError("instance: realization uses unknown state at item " +
                           std::to_string(e));
      }
  }
}

double Instance::min_real_cost() const {
  double m = costs_.cost(0);
  for (ItemId e = 1; e < num_real_; ++e) m = std::min(m, costs_.cost(e));
  return m;
}

ItemSet Instance::real_items() const {
  ItemSet s;
  for (ItemId e = 0; e < num_real_; ++e) s.add(e);
  return s;
}

Instance Instance::with_dummy_items(int count) const {
  if (count < 0) throw ModelError("with_dummy_items: negative count");
  StateSpace st = states_;
  CostFunction cf = costs_;
  for (int i = 0; i < count; ++i) {
    st.states_per_item.push_back(1);
    cf.costs.push_back(0.0);
  }
  Prior pr = prior_;
  if (prior_.kind() == Prior::Kind::Independent) {
    auto probs = prior_.marginals();
    for (int i = 0; i < count; ++i) probs.push_back({1.0});
    pr = Prior::independent(std::move(probs));
  } else {
    auto rows = prior_.rows();
    for (ExplicitRow& r : rows) {
      auto states = r.phi.states();
      states.insert(states.end(), static_cast<size_t>(count), 0);
      r.phi = Realization(std::move(states));
    }
    pr = Prior::explicit_rows(std::move(rows));
  }
  return Instance(id_, std::move(st), std::move(cf), std::move(pr), utility_,
                  num_real_);
}

Prior condition_prior(const Prior& prior, const PartialRealization& psi) {
  if (prior.kind() == Prior::Kind::Independent) {
    auto probs = prior.marginals();
    for (const Observation& o : psi.observations()) {
      auto& row = probs.at(static_cast<size_t>(o.item));
      if (o.state < 0 || o.state >= static_cast<int>(row.size()) ||
          row[static_cast<size_t>(o.state)] <= 0.0)
        throw ConditioningError("conditioning on zero-probability state " +
                                std::to_string(o.state) + " of item " +
                                std::to_string(o.item));
      std::fill(row.begin(), row.end(), 0.0);
      row[static_cast<size_t>(o.state)] = 1.0;
    }
    return Prior::independent(std::move(probs));
  }
  std::vector<ExplicitRow> kept;
  double z = 0.0;
  for (const ExplicitRow& r : prior.rows()) {
    if (r.p > 0.0 && is_consistent(r.phi, psi)) {
      kept.push_back(r);
      z += r.p;
    }
  }
  if (kept.empty() || z <= 0.0)
    throw ConditioningError(
        "conditioning on a zero-probability partial realization");
  for (ExplicitRow& r : kept) r.p /= z;
  return Prior::explicit_rows(std::move(kept));
}

Realization sample_realization(const Prior& prior,
                               const PartialRealization& psi,
                               std::mt19937_64& rng) {
  if (prior.kind() == Prior::Kind::Independent) {
    const auto& probs = prior.marginals();
    std::vector<int> states(probs.size(), 0);
    for (size_t e = 0; e < probs.size(); ++e) {
      ItemId id = static_cast<ItemId>(e);
      if (psi.contains(id)) {
        int s = psi.state_of(id);
        if (s < 0 || s >= static_cast<int>(probs[e].size()) ||
            probs[e][static_cast<size_t>(s)] <= 0.0)
          throw ConditioningError("sampling conditioned on zero-probability "
                                  "state of item " + std::to_string(id));
        states[e] = s;
        continue;
      }
      double u = uniform_unit(rng);
      double acc = 0.0;
      int chosen = static_cast<int>(probs[e].size()) - 1;
      for (size_t s = 0; s < probs[e].size(); ++s) {
        acc += probs[e][s];
        if (u < acc) {
          chosen = static_cast<int>(s);
          break;
        }
      }
      states[e] = chosen;
    }
    return Realization(std::move(states));
  }

  double z = 0.0;
  for (const ExplicitRow& r : prior.rows())
    if (r.p > 0.0 && is_consistent(r.phi, psi)) z += r.p;
  if (z <= 0.0)
    throw ConditioningError(
        "sampling conditioned on a zero-probability partial realization");
  double u = uniform_unit(rng) * z;
  double acc = 0.0;
  const ExplicitRow* last = nullptr;
  for (const ExplicitRow& r : prior.rows()) {
    if (r.p <= 0.0 || !is_consistent(r.phi, psi)) continue;
    last = &r;
    acc += r.p;
    if (u < acc) return r.phi;
  }
  return last->phi;
}

std::vector<ExplicitRow> enumerate_realizations(const Prior& prior, long cap) {
  if (prior.kind() == Prior::Kind::Explicit) {
    std::vector<ExplicitRow> out;
    for (const ExplicitRow& r : prior.rows())
      if (r.p > 0.0) out.push_back(r);
    if (static_cast<long>(out.size()) > cap)
      throw EnumerationCapError("realization support exceeds cap of " +
                                std::to_string(cap));
    return out;
  }

  const auto& probs = prior.marginals();
  if (probs.empty()) return {{Realization(std::vector<int>{}), 1.0}};
  std::vector<std::vector<int>> support(probs.size());
  double count = 1.0;
  for (size_t e = 0; e < probs.size(); ++e) {
    for (size_t s = 0; s < probs[e].size(); ++s)
      if (probs[e][s] > 0.0) support[e].push_back(static_cast<int>(s));
    count *= static_cast<double>(support[e].size());
    if (count > static_cast<double>(cap))
      throw EnumerationCapError("realization support exceeds cap of " +
                                std::to_string(cap));
  }

  std::vector<ExplicitRow> out;
  out.reserve(static_cast<size_t>(count));
  std::vector<size_t> idx(probs.size(), 0);
  for (;;) {
    std::vector<int> states(probs.size());
    double p = 1.0;
    for (size_t e = 0; e < probs.size(); ++e) {
      states[e] = support[e][idx[e]];
      p *= probs[e][static_cast<size_t>(states[e])];
    }
    out.push_back({Realization(std::move(states)), p});
    // odometer with the last item fastest
    size_t e = probs.size();
    while (e > 0) {
      --e;
      if (++idx[e] < support[e].size()) break;
      idx[e] = 0;
      if (e == 0) return out;
    }
  }
}

}  // namespace pasm
