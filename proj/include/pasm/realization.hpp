#pragma once

#include <algorithm>
#include <vector>

#include "pasm/types.hpp"

namespace pasm {

/**
 * Full state assignment: one state label per item, indexed by item id.
 * State labels are dense integers starting at 0.
 */
class Realization {
 public:
  Realization() = default;
  explicit Realization(std::vector<int> states) : states_(std::move(states)) {}

  int state_of(ItemId e) const { return states_.at(static_cast<size_t>(e)); }
  int size() const { return static_cast<int>(states_.size()); }
  const std::vector<int>& states() const { return states_; }

  friend bool operator==(const Realization&, const Realization&) = default;
  friend auto operator<=>(const Realization&, const Realization&) = default;

 private:
  std::vector<int> states_;
};

/**
 * Partial state assignment: the observations a policy has accumulated,
 * in the order they were made. Each item appears at most once.
 */
class PartialRealization {
 public:
  PartialRealization() = default;

  bool contains(ItemId e) const { return domain_.contains(e); }

  int state_of(ItemId e) const {
    for (const Observation& o : obs_)
      if (o.item == e) return o.state;
    throw ModelError("state_of: item " + std::to_string(e) + " not observed");
  }

  /** Records (e, state). Re-observing with the same state is a no-op. */
  void observe(ItemId e, int state) {
    if (contains(e)) {
      if (state_of(e) != state)
        throw ModelError("observe: conflicting state for item " +
                         std::to_string(e));
      return;
    }
    obs_.push_back({e, state});
    domain_.add(e);
  }

  const std::vector<Observation>& observations() const { return obs_; }
  const ItemSet& domain() const { return domain_; }
  int size() const { return static_cast<int>(obs_.size()); }
  bool empty() const { return obs_.empty(); }

  /** Observations sorted by item id; used as a canonical cache key. */
  std::vector<Observation> canonical() const {
    std::vector<Observation> v = obs_;
    std::sort(v.begin(), v.end(),
              [](const Observation& a, const Observation& b) {
                return a.item < b.item;
              });
    return v;
  }

 private:
  std::vector<Observation> obs_;
  ItemSet domain_;
};

/** True when every observation in psi matches phi. */
inline bool is_consistent(const Realization& phi, const PartialRealization& psi) {
  for (const Observation& o : psi.observations())
    if (phi.state_of(o.item) != o.state) return false;
  return true;
}

/** True when inner's observations are a subset of outer's. */
inline bool is_subrealization(const PartialRealization& inner,
                              const PartialRealization& outer) {
  for (const Observation& o : inner.observations()) {
    if (!outer.contains(o.item) || outer.state_of(o.item) != o.state)
      return false;
  }
  return true;
}

}  // namespace pasm
