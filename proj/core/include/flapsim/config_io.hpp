#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "flapsim/gait.hpp"
#include "flapsim/model.hpp"
#include "flapsim/scenario.hpp"

namespace flapsim {

using Json = nlohmann::json;

/// Reads a UTF-8 JSON document; throws ParseError on I/O or syntax errors.
Json read_json_file(const std::filesystem::path& path);

// Strict decoders: unknown keys raise ParseError, invariant violations raise
// ValidationError. Field names carry their units ("span_m", "mass_kg").
RobotModel robot_from_json(const Json& doc);
GaitSchedule gait_from_json(const Json& doc);
ScenarioConfig scenario_from_json(const Json& doc);

Json to_json(const RobotModel& model);
Json to_json(const GaitSchedule& gait);
Json to_json(const ScenarioConfig& scenario);

RobotModel load_robot(const std::filesystem::path& path);
GaitSchedule load_gait(const std::filesystem::path& path);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Applies `key=value` where key is a dotted path ("controller.roll.kp").
/// The value is parsed as JSON when possible, else taken as a string, and
/// must match the type of the value it replaces.
void apply_override(Json& doc, std::string_view assignment);

/// Routes each override to the first document whose top level holds the
/// leading path component. Throws ParseError when no document matches.
void apply_overrides(std::vector<Json*> documents, const std::vector<std::string>& assignments);

}  // namespace flapsim
