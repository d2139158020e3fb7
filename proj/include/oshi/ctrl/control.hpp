#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oshi/netsim/fib.hpp"
#include "oshi/netsim/network.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::ctrl {

struct ControlReport {
  std::vector<std::pair<std::string, std::string>> reachable;    // (node, controller)
  std::vector<std::pair<std::string, std::string>> unreachable;  // (node, controller)

  bool ok() const { return unreachable.empty(); }
  nlohmann::json toJson() const;
};

// In-band control check on a fresh network built with the given FIBs (no
// SBP rules): every OSHI node sends an IP packet from its loopback to its
// controller's address.
ControlReport verifyControlConnectivity(const topo::TopologyModel& model, const netsim::FibMap& fibs);
// Same check on a live network, whatever is installed on it.
ControlReport verifyControlConnectivity(netsim::Network& net);

}  // namespace oshi::ctrl
