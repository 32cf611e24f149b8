#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "mmpmbm/pmbm.hpp"

namespace mmpmbm {

/// Debug/regression snapshot of a PmbmState:
/// {
///   "step": k,
///   "ppp": [ per model: [ {"w":..,"mean":[..],"cov":[[..]]}, .. ] ],
///   "hypotheses": [ {"log_weight":..,
///                    "bernoullis": [ {"r":..,"log_weight":..,
///                                     "density":[ per model: [components] ]} ]} ]
/// }
nlohmann::json state_to_json(const PmbmState& state);

PmbmState state_from_json(const nlohmann::json& j);

std::string state_to_json_string(const PmbmState& state, int indent = 2);

}  // namespace mmpmbm
