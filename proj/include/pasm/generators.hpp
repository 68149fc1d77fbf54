#pragma once

#include <cstdint>
#include <string>

#include "pasm/model.hpp"

namespace pasm {

/**
 * Seeded instance generators for the three built-in families:
 *   weighted_coverage   independent prior, monotone coverage
 *   coverage_penalty    coverage minus per-item penalties; item 0 is
 *                       always a non-monotone witness (its penalty
 *                       exceeds its expected coverage gain from scratch)
 *   version_space       explicit prior, one hypothesis per realization
 *
 * The same (family, n, states, seed) always yields the same instance.
 * All randomness is drawn through our own uniform mapping, so output
 * does not depend on the standard library's distribution details.
 */
Instance generate_instance(const std::string& family, int n, int states,
                           std::uint64_t seed);

}  // namespace pasm
