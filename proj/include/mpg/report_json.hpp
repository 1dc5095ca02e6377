#pragma once

#include <json.hpp>

#include "mpg/counterexample.hpp"
#include "mpg/equilibrium.hpp"
#include "mpg/potential.hpp"

namespace mpg {

/// JSON views of the report structs, shared by the CLI and the python
/// bindings so both surfaces serialize verdicts identically.
nlohmann::json condition_to_json(const ConditionReport& report);
nlohmann::json nash_to_json(const NashReport& report);
nlohmann::json alignment_to_json(const AlignmentReport& report);
nlohmann::json cycle_to_json(const DeviationCycle& cycle);
nlohmann::json counterexample_to_json(const CounterexampleReport& report);

}  // namespace mpg
