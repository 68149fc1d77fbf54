#include "pasm/generators.hpp"

#include <algorithm>
#include <numeric>

namespace pasm {

namespace {

int rand_below(std::mt19937_64& rng, int n) {
  return std::min(n - 1, static_cast<int>(uniform_unit(rng) *
                                          static_cast<double>(n)));
}

/** Costs on a coarse grid {1, 1.5, 2} keep density ratios well away
 *  from accidental float ties. */
std::vector<double> draw_costs(std::mt19937_64& rng, int n) {
  std::vector<double> costs(static_cast<size_t>(n));
  for (double& c : costs) c = 1.0 + 0.5 * rand_below(rng, 3);
  return costs;
}

std::vector<double> draw_simplex(std::mt19937_64& rng, int m) {
  std::vector<int> w(static_cast<size_t>(m));
  int total = 0;
  for (int& x : w) {
    x = 1 + rand_below(rng, 4);
    total += x;
  }
  std::vector<double> p(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i)
    p[static_cast<size_t>(i)] = static_cast<double>(w[static_cast<size_t>(i)]) /
                                static_cast<double>(total);
  return p;
}

WeightedCoverageParams draw_coverage(std::mt19937_64& rng, int n, int states) {
  WeightedCoverageParams p;
  p.num_elements = n + 2;
  for (int j = 0; j < p.num_elements; ++j)
    p.weights.push_back(0.5 + 0.25 * rand_below(rng, 7));
  for (int e = 0; e < n; ++e) {
    std::vector<std::vector<int>> per_state;
    for (int s = 0; s < states; ++s) {
      std::vector<int> elems;
      for (int j = 0; j < p.num_elements; ++j)
        if (uniform_unit(rng) < 0.5) elems.push_back(j);
      per_state.push_back(std::move(elems));
    }
    p.covers.push_back(std::move(per_state));
  }
  return p;
}

Prior draw_independent_prior(std::mt19937_64& rng, int n, int states) {
  std::vector<std::vector<double>> probs;
  for (int e = 0; e < n; ++e) probs.push_back(draw_simplex(rng, states));
  return Prior::independent(std::move(probs));
}

std::string make_id(const std::string& family, int n, std::uint64_t seed) {
  return family + "-n" + std::to_string(n) + "-x" + std::to_string(seed);
}

Instance gen_weighted_coverage(int n, int states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightedCoverageParams cov = draw_coverage(rng, n, states);
  Prior prior = draw_independent_prior(rng, n, states);
  CostFunction costs{draw_costs(rng, n)};
  StateSpace space{std::vector<int>(static_cast<size_t>(n), states)};
  return Instance(make_id("weighted_coverage", n, seed), std::move(space),
                  std::move(costs), std::move(prior),
                  UtilityFunction(std::move(cov)), n);
}

Instance gen_coverage_penalty(int n, int states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  CoverageWithPenaltyParams p;
  p.base = draw_coverage(rng, n, states);
  Prior prior = draw_independent_prior(rng, n, states);
  CostFunction costs{draw_costs(rng, n)};

  for (int e = 0; e < n; ++e)
    p.penalties.push_back(0.25 * rand_below(rng, 3));
  // item 0 must witness non-monotonicity: push its penalty a clear
  // margin above its expected coverage gain at the empty history
  double gain0 = 0.0;
  for (int s = 0; s < static_cast<int>(p.base.covers[0].size()); ++s) {
    double w = 0.0;
    for (int j : p.base.covers[0][static_cast<size_t>(s)])
      w += p.base.weights[static_cast<size_t>(j)];
    gain0 += prior.marginals()[0][static_cast<size_t>(s)] * w;
  }
  p.penalties[0] = gain0 + 0.25;

  StateSpace space{std::vector<int>(static_cast<size_t>(n), states)};
  return Instance(make_id("coverage_penalty", n, seed), std::move(space),
                  std::move(costs), std::move(prior),
                  UtilityFunction(std::move(p)), n);
}

Instance gen_version_space(int n, int states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);

  // enumerate the whole answer-vector space, shuffle, keep a handful
  long space_size = 1;
  for (int e = 0; e < n; ++e) {
    space_size *= states;
    if (space_size > 100'000)
      throw ConfigError("version_space: answer space too large");
  }
  std::vector<std::vector<int>> all;
  std::vector<int> cur(static_cast<size_t>(n), 0);
  for (long i = 0; i < space_size; ++i) {
    all.push_back(cur);
    for (int e = n - 1; e >= 0; --e) {
      if (++cur[static_cast<size_t>(e)] < states) break;
      cur[static_cast<size_t>(e)] = 0;
    }
  }
  for (size_t i = all.size() - 1; i > 0; --i)
    std::swap(all[i], all[static_cast<size_t>(rand_below(
                  rng, static_cast<int>(i) + 1))]);

  int h_count = std::min<int>(static_cast<int>(all.size()), n + 2);
  VersionSpaceParams p;
  std::vector<double> masses = draw_simplex(rng, h_count);
  std::vector<ExplicitRow> rows;
  for (int h = 0; h < h_count; ++h) {
    p.answers.emplace_back(all[static_cast<size_t>(h)]);
    p.masses.push_back(masses[static_cast<size_t>(h)]);
    rows.push_back({Realization(all[static_cast<size_t>(h)]),
                    masses[static_cast<size_t>(h)]});
  }

  CostFunction costs{draw_costs(rng, n)};
  StateSpace space{std::vector<int>(static_cast<size_t>(n), states)};
  return Instance(make_id("version_space", n, seed), std::move(space),
                  std::move(costs), Prior::explicit_rows(std::move(rows)),
                  UtilityFunction(std::move(p)), n);
}

}  // namespace

Instance generate_instance(const std::string& family, int n, int states,
                           std::uint64_t seed) {
  if (n < 1 || n > ItemSet::max_items)
    throw ConfigError("generate_instance: n out of range");
  if (states < 1) throw ConfigError("generate_instance: need states >= 1");
  if (family == "weighted_coverage") return gen_weighted_coverage(n, states, seed);
  if (family == "coverage_penalty") return gen_coverage_penalty(n, states, seed);
  if (family == "version_space") return gen_version_space(n, states, seed);
  throw ConfigError("generate_instance: unknown family '" + family + "'");
}

}  // namespace pasm
