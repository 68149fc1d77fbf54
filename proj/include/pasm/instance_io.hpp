#pragma once

#include <string>

#include "json.hpp"
#include "pasm/model.hpp"

namespace pasm {

/**
 * Reads an instance from its JSON form. Errors carry the path of the
 * offending field. Knapsack feasibility (strictly positive costs) is
 * checked by the policies, not here; parsing only enforces shape,
 * nonnegativity and probability sums.
 */
Instance parse_instance_json(const nlohmann::json& j,
                             const std::string& default_id = "instance");

/** Reads and validates the instance stored in a JSON file. */
Instance parse_instance(const std::string& path);

/** Inverse of parse_instance_json; round-trips exactly. */
nlohmann::json instance_to_json(const Instance& inst);

void write_instance(const Instance& inst, const std::string& path);

}  // namespace pasm
