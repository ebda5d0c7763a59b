#pragma once

// Structured-text (JSON) documents for instances, rewards, scenario
// configurations and reward solutions.
//
// Instance document:
//   { "profiles": [{"a": 2, "b": 1}, ...],
//     "graph":    [[0, 0.5], [0.5, 0]],      // dense, row-major
//     "params":   {"c": 1, "mu": 1, "s": 4, "t": 1},
//     "expectation": {"e_a": 15, "e_b": 15} } // optional
// Reward document: { "r": [1, 1] }

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "crowdmarket/experiments.hpp"
#include "crowdmarket/market.hpp"
#include "crowdmarket/reward.hpp"
#include "crowdmarket/scenario.hpp"

namespace crowdmarket::io {

using Json = nlohmann::ordered_json;

/// Parses text; syntax errors become ParseError naming source, line, column.
Json parse_json(std::string_view text, std::string_view source);
Json load_json_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

/// Applies "dotted.key=value" overrides. Values that parse as JSON
/// (numbers, booleans, arrays) are stored as such, anything else as a
/// string. Numeric segments index arrays.
void apply_overrides(Json& doc, std::span<const std::string> overrides);

MarketInstance instance_from_json(const Json& doc);
Json to_json(const MarketInstance& inst);

/// Optional "expectation" block of an instance document.
std::optional<ExpectationProfile> expectation_from_json(const Json& doc);

RewardVector reward_from_json(const Json& doc);
Json to_json(const RewardVector& r);

ScenarioConfig scenario_from_json(const Json& doc);
Json to_json(const ScenarioConfig& cfg);

Json to_json(const EquilibriumResult& eq);
Json to_json(const RewardSolution& sol);

}  // namespace crowdmarket::io
