#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hbpl/objectives.hpp"

namespace hbpl {

/// Builds a built-in objective from its registry id and a JSON parameter
/// object. Ids and keys:
///   "quadratic"   dim (100), mu, L (1), seed (0)
///   "sin-valley"  c (0.125)
///   "piecewise"   eps (1)
///   "flat-bottom" (none)
///   "abs"         (none)
/// Missing keys take the defaults in parentheses; "mu" is required for the
/// quadratic.
ObjectiveFunction make_objective(const std::string& id, const nlohmann::json& params);

std::vector<std::string> registered_objectives();

}  // namespace hbpl
