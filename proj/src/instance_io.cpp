#include "pasm/instance_io.hpp"

#include <fstream>

namespace pasm {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& name,
                  const std::string& at) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(at + name + ": missing field");
  return *it;
}

template <class T>
T as(const json& j, const std::string& at) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ParseError(at + ": wrong type");
  }
}

std::vector<double> number_array(const json& j, const std::string& at,
                                 size_t expect) {
  auto v = as<std::vector<double>>(j, at);
  if (v.size() != expect)
    throw ParseError(at + ": expected " + std::to_string(expect) +
                     " entries, got " + std::to_string(v.size()));
  return v;
}

StateSpace parse_states(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ParseError("states: expected one label array per item");
  StateSpace out;
  for (int e = 0; e < n; ++e) {
    std::string at = "states[" + std::to_string(e) + "]";
    auto labels = as<std::vector<int>>(j[static_cast<size_t>(e)], at);
    if (labels.empty()) throw ParseError(at + ": item needs at least one state");
    for (size_t s = 0; s < labels.size(); ++s)
      if (labels[s] != static_cast<int>(s))
        throw ParseError(at + ": labels must be dense 0..m-1");
    out.states_per_item.push_back(static_cast<int>(labels.size()));
  }
  return out;
}

Prior parse_prior(const json& j, const StateSpace& states) {
  std::string kind = as<std::string>(field(j, "kind", "prior."), "prior.kind");
  int n = states.num_items();
  try {
    if (kind == "independent") {
      const json& probs = field(j, "probs", "prior.");
      if (!probs.is_array() || static_cast<int>(probs.size()) != n)
        throw ParseError("prior.probs: expected one distribution per item");
      std::vector<std::vector<double>> rows;
      for (int e = 0; e < n; ++e)
        rows.push_back(number_array(
            probs[static_cast<size_t>(e)],
            "prior.probs[" + std::to_string(e) + "]",
            static_cast<size_t>(states.num_states(e))));
      return Prior::independent(std::move(rows));
    }
    if (kind == "explicit") {
      const json& rows = field(j, "rows", "prior.");
      if (!rows.is_array() || rows.empty())
        throw ParseError("prior.rows: expected a non-empty array");
      std::vector<ExplicitRow> out;
      for (size_t i = 0; i < rows.size(); ++i) {
        std::string at = "prior.rows[" + std::to_string(i) + "]";
        const json& row = rows[i];
        auto phi = as<std::vector<int>>(field(row, "phi", at + "."), at + ".phi");
        if (static_cast<int>(phi.size()) != n)
          throw ParseError(at + ".phi: expected " + std::to_string(n) +
                           " states");
        for (int e = 0; e < n; ++e)
          if (phi[static_cast<size_t>(e)] < 0 ||
              phi[static_cast<size_t>(e)] >= states.num_states(e))
            throw ParseError(at + ".phi: illegal state for item " +
                             std::to_string(e));
        out.push_back({Realization(std::move(phi)),
                       as<double>(field(row, "p", at + "."), at + ".p")});
      }
      return Prior::explicit_rows(std::move(out));
    }
  } catch (const ModelError& err) {
    throw ParseError(std::string("prior: ") + err.what());
  }
  throw ParseError("prior.kind: unknown kind '" + kind + "'");
}

WeightedCoverageParams parse_coverage(const json& j, int n,
                                      const StateSpace& states,
                                      const std::string& at) {
  WeightedCoverageParams p;
  p.num_elements = as<int>(field(j, "elements", at), at + "elements");
  if (p.num_elements < 0) throw ParseError(at + "elements: negative count");
  p.weights = number_array(field(j, "weights", at), at + "weights",
                           static_cast<size_t>(p.num_elements));
  for (size_t m = 0; m < p.weights.size(); ++m)
    if (p.weights[m] < 0.0)
      throw ParseError(at + "weights[" + std::to_string(m) + "]: negative");
  const json& covers = field(j, "covers", at);
  if (!covers.is_array() || static_cast<int>(covers.size()) != n)
    throw ParseError(at + "covers: expected one block per item");
  for (int e = 0; e < n; ++e) {
    std::string here = at + "covers[" + std::to_string(e) + "]";
    const json& per_state = covers[static_cast<size_t>(e)];
    if (!per_state.is_array() ||
        static_cast<int>(per_state.size()) != states.num_states(e))
      throw ParseError(here + ": expected one element list per state");
    std::vector<std::vector<int>> lists;
    for (size_t s = 0; s < per_state.size(); ++s) {
      auto elems = as<std::vector<int>>(per_state[s],
                                        here + "[" + std::to_string(s) + "]");
      for (int el : elems)
        if (el < 0 || el >= p.num_elements)
          throw ParseError(here + "[" + std::to_string(s) +
                           "]: element out of range");
      lists.push_back(std::move(elems));
    }
    p.covers.push_back(std::move(lists));
  }
  return p;
}

UtilityFunction parse_utility(const json& j, int n, const StateSpace& states) {
  std::string kind =
      as<std::string>(field(j, "kind", "utility."), "utility.kind");
  if (kind == "weighted_coverage")
    return UtilityFunction(parse_coverage(j, n, states, "utility."));
  if (kind == "coverage_penalty") {
    CoverageWithPenaltyParams p;
    p.base = parse_coverage(j, n, states, "utility.");
    p.penalties = number_array(field(j, "penalties", "utility."),
                               "utility.penalties", static_cast<size_t>(n));
    for (size_t e = 0; e < p.penalties.size(); ++e)
      if (p.penalties[e] < 0.0)
        throw ParseError("utility.penalties[" + std::to_string(e) +
                         "]: negative");
    return UtilityFunction(std::move(p));
  }
  if (kind == "version_space") {
    const json& hyp = field(j, "hypotheses", "utility.");
    if (!hyp.is_array() || hyp.empty())
      throw ParseError("utility.hypotheses: expected a non-empty array");
    VersionSpaceParams p;
    for (size_t h = 0; h < hyp.size(); ++h) {
      std::string at = "utility.hypotheses[" + std::to_string(h) + "]";
      auto answers =
          as<std::vector<int>>(field(hyp[h], "answers", at + "."),
                               at + ".answers");
      if (static_cast<int>(answers.size()) != n)
        throw ParseError(at + ".answers: expected " + std::to_string(n) +
                         " entries");
      for (int e = 0; e < n; ++e)
        if (answers[static_cast<size_t>(e)] < 0 ||
            answers[static_cast<size_t>(e)] >= states.num_states(e))
          throw ParseError(at + ".answers: illegal state for item " +
                           std::to_string(e));
      double mass = as<double>(field(hyp[h], "mass", at + "."), at + ".mass");
      if (mass < 0.0) throw ParseError(at + ".mass: negative");
      p.answers.emplace_back(std::move(answers));
      p.masses.push_back(mass);
    }
    return UtilityFunction(std::move(p));
  }
  if (kind == "tabular") {
    const json& entries = field(j, "entries", "utility.");
    if (!entries.is_array())
      throw ParseError("utility.entries: expected an array");
    TabularParams p;
    for (size_t i = 0; i < entries.size(); ++i) {
      std::string at = "utility.entries[" + std::to_string(i) + "]";
      auto items = as<std::vector<ItemId>>(field(entries[i], "items", at + "."),
                                           at + ".items");
      auto phi = as<std::vector<int>>(field(entries[i], "phi", at + "."),
                                      at + ".phi");
      if (static_cast<int>(phi.size()) != n)
        throw ParseError(at + ".phi: expected " + std::to_string(n) +
                         " states");
      double value = as<double>(field(entries[i], "value", at + "."),
                                at + ".value");
      std::sort(items.begin(), items.end());
      p.table[{std::move(items), std::move(phi)}] = value;
    }
    return UtilityFunction(std::move(p));
  }
  throw ParseError("utility.kind: unknown kind '" + kind + "'");
}

}  // namespace

Instance parse_instance_json(const nlohmann::json& j,
                             const std::string& default_id) {
  if (!j.is_object()) throw ParseError("instance: expected a JSON object");
  int n = as<int>(field(j, "n", ""), "n");
  if (n < 1 || n > ItemSet::max_items)
    throw ParseError("n: must lie in [1, " +
                     std::to_string(ItemSet::max_items) + "]");
  std::string id = default_id;
  if (auto it = j.find("id"); it != j.end()) id = as<std::string>(*it, "id");

  StateSpace states = parse_states(field(j, "states", ""), n);
  CostFunction costs{number_array(field(j, "costs", ""), "costs",
                                  static_cast<size_t>(n))};
  for (int e = 0; e < n; ++e)
    if (costs.costs[static_cast<size_t>(e)] < 0.0)
      throw ParseError("costs[" + std::to_string(e) + "]: negative");

  Prior prior = parse_prior(field(j, "prior", ""), states);
  UtilityFunction utility = parse_utility(field(j, "utility", ""), n, states);
  try {
    return Instance(std::move(id), std::move(states), std::move(costs),
                    std::move(prior), std::move(utility), n);
  } catch (const ModelError& err) {
    throw ParseError(std::string("instance: ") + err.what());
  }
}

Instance parse_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& err) {
    throw ParseError(path + ": " + err.what());
  }
  std::string stem = path;
  if (auto slash = stem.find_last_of('/'); slash != std::string::npos)
    stem = stem.substr(slash + 1);
  if (auto dot = stem.find_last_of('.'); dot != std::string::npos)
    stem = stem.substr(0, dot);
  return parse_instance_json(j, stem);
}

nlohmann::json instance_to_json(const Instance& inst) {
  int n = inst.num_real_items();
  json j;
  j["id"] = inst.id();
  j["n"] = n;
  json states = json::array();
  for (int e = 0; e < n; ++e) {
    json labels = json::array();
    for (int s = 0; s < inst.num_states(e); ++s) labels.push_back(s);
    states.push_back(std::move(labels));
  }
  j["states"] = std::move(states);
  j["costs"] = std::vector<double>(inst.cost_function().costs.begin(),
                                   inst.cost_function().costs.begin() + n);

  json prior;
  if (inst.prior().kind() == Prior::Kind::Independent) {
    prior["kind"] = "independent";
    prior["probs"] = inst.prior().marginals();
  } else {
    prior["kind"] = "explicit";
    json rows = json::array();
    for (const ExplicitRow& row : inst.prior().rows())
      rows.push_back({{"phi", row.phi.states()}, {"p", row.p}});
    prior["rows"] = std::move(rows);
  }
  j["prior"] = std::move(prior);

  json u;
  auto coverage_json = [](const WeightedCoverageParams& p, json& out) {
    out["elements"] = p.num_elements;
    out["weights"] = p.weights;
    out["covers"] = p.covers;
  };
  if (const auto* cov = inst.utility().get_if<WeightedCoverageParams>()) {
    u["kind"] = "weighted_coverage";
    coverage_json(*cov, u);
  } else if (const auto* pen =
                 inst.utility().get_if<CoverageWithPenaltyParams>()) {
    u["kind"] = "coverage_penalty";
    coverage_json(pen->base, u);
    u["penalties"] = pen->penalties;
  } else if (const auto* vs = inst.utility().get_if<VersionSpaceParams>()) {
    u["kind"] = "version_space";
    json hyp = json::array();
    for (size_t h = 0; h < vs->answers.size(); ++h)
      hyp.push_back({{"answers", vs->answers[h].states()},
                     {"mass", vs->masses[h]}});
    u["hypotheses"] = std::move(hyp);
  } else if (const auto* tab = inst.utility().get_if<TabularParams>()) {
    u["kind"] = "tabular";
    json entries = json::array();
    for (const auto& [key, value] : tab->table)
      entries.push_back(
          {{"items", key.first}, {"phi", key.second}, {"value", value}});
    u["entries"] = std::move(entries);
  }
  j["utility"] = std::move(u);
  return j;
}

void write_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open " + path + " for writing");
  out << instance_to_json(inst).dump(2) << "\n";
}

}  // namespace pasm
