#pragma once

#include <string>

#include "envopt/scenario.hpp"

namespace envopt {

// JSON scenario files. Loads validate the schema and the scene invariants
// (throws ParseError / InvalidScenario with field context); save then load is
// a structural identity.
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);

} // namespace envopt
