#pragma once

#include <string>

#include <json.hpp>

#include "oshi/topo/model.hpp"

namespace oshi::topo {

inline constexpr int kSchemaVersion = 1;

nlohmann::json exportJson(const TopologyModel& model);

// Throws Error{SchemaViolation} whose subject is the JSON pointer of the
// offending element (e.g. "/nodes" or "/links/3/kind").
TopologyModel importJson(const nlohmann::json& doc);

// Text helpers; dump uses 2-space indent and sorted keys.
std::string dumpTopology(const TopologyModel& model);
TopologyModel parseTopology(const std::string& text);

}  // namespace oshi::topo
