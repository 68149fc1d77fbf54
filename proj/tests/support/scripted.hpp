#pragma once

#include <deque>
#include <stdexcept>

#include "pasm/policy.hpp"

namespace pasm::testing {

/**
 * Drives a policy with a fixed realization and a fixed list of choice
 * indices, for hand-checked traces. Throws when the script runs dry or
 * a scripted index does not fit the offered weights.
 */
class ScriptedContext final : public PolicyContext {
 public:
  ScriptedContext(Realization phi, std::vector<int> picks = {})
      : phi_(std::move(phi)), picks_(picks.begin(), picks.end()) {}

  int choose(std::span<const double> weights) override {
    if (picks_.empty())
      throw std::runtime_error("scripted context: no picks left");
    int i = picks_.front();
    picks_.pop_front();
    if (i < 0 || i >= static_cast<int>(weights.size()))
      throw std::runtime_error("scripted context: pick out of range");
    return i;
  }

  std::vector<int> reveal(std::span<const ItemId> items) override {
    std::vector<int> out;
    out.reserve(items.size());
    for (ItemId e : items)
      out.push_back(e < phi_.size() ? phi_.state_of(e) : 0);  // dummies: 0
    return out;
  }

  bool exhausted() const { return picks_.empty(); }

 private:
  Realization phi_;
  std::deque<int> picks_;
};

}  // namespace pasm::testing
