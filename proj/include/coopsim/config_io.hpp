#pragma once

#include <string>
#include <vector>

#include "coopsim/pricing.hpp"
#include "coopsim/sim.hpp"

namespace coopsim {

// JSON round trip for scenario files. Unknown keys are rejected so a typo
// cannot silently fall back to a default.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);
std::string scenario_to_json(const ScenarioConfig& cfg);
void save_scenario(const ScenarioConfig& cfg, const std::string& path);

// Stable text renderings (fixed formats, LF endings) so repeated runs of
// the same build diff clean.
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string sweep_json(const std::vector<SweepRow>& rows);
std::string episode_csv(const SimResult& r);
std::string episode_json(const SimResult& r);
std::string price_history_csv(const PriceResult& r);
std::string price_history_json(const PriceResult& r);

}  // namespace coopsim
