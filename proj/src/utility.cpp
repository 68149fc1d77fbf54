#include "pasm/utility.hpp"

#include <sstream>

namespace pasm {
namespace {

double coverage_value(const WeightedCoverageParams& p, const ItemSet& selected,
                      const Realization& phi, int num_real) {
  std::vector<char> covered(static_cast<size_t>(p.num_elements), 0);
  for (ItemId e : selected.to_vector()) {
    if (e >= num_real) continue;
    const auto& per_state = p.covers[static_cast<size_t>(e)];
    int s = phi.state_of(e);
    for (int el : per_state[static_cast<size_t>(s)]) covered[static_cast<size_t>(el)] = 1;
  }
  double v = 0.0;
  for (int el = 0; el < p.num_elements; ++el)
    if (covered[static_cast<size_t>(el)]) v += p.weights[static_cast<size_t>(el)];
  return v;
}

}  // namespace

double UtilityFunction::evaluate(const ItemSet& selected, const Realization& phi,
                                 int num_real) const {
  if (const auto* wc = std::get_if<WeightedCoverageParams>(&impl_))
    return coverage_value(*wc, selected, phi, num_real);

  if (const auto* cp = std::get_if<CoverageWithPenaltyParams>(&impl_)) {
    double v = coverage_value(cp->base, selected, phi, num_real);
    for (ItemId e : selected.to_vector())
      if (e < num_real) v -= cp->penalties[static_cast<size_t>(e)];
    return v;
  }

  if (const auto* vs = std::get_if<VersionSpaceParams>(&impl_)) {
    double eliminated = 0.0;
    for (size_t h = 0; h < vs->answers.size(); ++h) {
      const Realization& ans = vs->answers[h];
      for (ItemId e : selected.to_vector()) {
        if (e >= num_real) continue;
        if (ans.state_of(e) != phi.state_of(e)) {
          eliminated += vs->masses[h];
          break;
        }
      }
    }
    return eliminated;
  }

  const auto& tab = std::get<TabularParams>(impl_);
  std::vector<ItemId> items;
  for (ItemId e : selected.to_vector())
    if (e < num_real) items.push_back(e);
  std::vector<int> states(phi.states().begin(),
                          phi.states().begin() + num_real);
  auto it = tab.table.find({items, states});
  if (it == tab.table.end()) {
    std::ostringstream os;
    os << "tabular utility: no entry for items {";
    for (size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
    os << "} under the given realization";
    throw EvaluationError(os.str());
  }
  return it->second;
}

std::string UtilityFunction::kind_name() const {
  switch (impl_.index()) {
    case 0: return "weighted_coverage";
    case 1: return "coverage_penalty";
    case 2: return "version_space";
    default: return "tabular";
  }
}

}  // namespace pasm
