#pragma once

#include <string>

#include <json.hpp>

#include "netcpd/detector.hpp"
#include "netcpd/generators.hpp"

namespace netcpd {

nlohmann::ordered_json to_json(const DetectorConfig& cfg);
/// Missing keys keep their defaults; the result is validated.
DetectorConfig detector_config_from_json(const nlohmann::json& j);

/// Custom graphons are written as nested arrays.
nlohmann::ordered_json to_json(const ScenarioSpec& spec);
nlohmann::ordered_json to_json(const ChangeScenario& truth);

nlohmann::json read_json_file(const std::string& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const std::string& path, const nlohmann::ordered_json& j);

}  // namespace netcpd
