#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oshi/topo/model.hpp"

namespace oshi::topo {

struct Violation {
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view code) const;
  nlohmann::json toJson() const;
};

// Checks every structural rule of the OSHI model. Violations are returned as
// data; this never throws.
//
// Codes: DUPLICATE_NODE_ID, DUPLICATE_LINK_ID, DUPLICATE_SERVICE_ID,
// DANGLING_LINK_ENDPOINT, SELF_LOOP, DUPLICATE_PORT, ACCESS_LINK_NOT_PE,
// CORE_LINK_BAD_ENDPOINT, CONTROL_LINK_BAD_ENDPOINT, BAD_COST_METRIC,
// CE_LINK_COUNT, CONTROLLER_UNASSIGNED, BAD_CONTROLLER_ASSIGNMENT,
// CORE_DISCONNECTED, SERVICE_ENDPOINT_COUNT, SERVICE_ENDPOINT_NOT_ACCESS,
// VLAN_OUT_OF_RANGE, DUPLICATE_VLAN_CLAIM, BAD_SERVICE_OPTION.
ValidationReport validate(const TopologyModel& model);

}  // namespace oshi::topo
