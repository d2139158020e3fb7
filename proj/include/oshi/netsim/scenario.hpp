#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oshi/netsim/network.hpp"

namespace oshi::netsim {

struct TrafficSpec {
  std::string id;
  std::string srcCe;
  std::string dstCe;
  // Empty: best-effort IP via the gateways. Otherwise the frames are sent
  // layer-2 to the destination CE over this service (which must be
  // provisioned), tagged with the source endpoint's VLAN if it has one.
  std::string service;
  double rate = 0;  // packets per second
  std::size_t pktBytes = 1000;
  double duration = 0;  // seconds
  double start = 0;
  // 0: one flow. Otherwise every `packetsPerFlow` packets use a new UDP
  // source port (a new flow-cache key).
  std::uint64_t packetsPerFlow = 0;
};

std::vector<TrafficSpec> trafficFromJson(const nlohmann::json& j);
nlohmann::json toJson(const std::vector<TrafficSpec>& specs);

struct ScenarioOptions {
  std::uint64_t seed = 0;
  // CPU sample interval in seconds; 0 disables sampling.
  double sampleInterval = 0;
  // Simulated time; 0 = until the last flow ends.
  double duration = 0;
};

struct NodeResult {
  std::string nodeId;
  std::uint64_t pkts = 0;
  std::uint64_t bytes = 0;
  double cost = 0;
  double cpuLoad = 0;  // cost / (duration * budget)
  double maxPacketCost = 0;
  std::optional<double> saturationEstimate;  // budget / maxPacketCost
  std::uint64_t dropped = 0;
  std::map<std::string, std::uint64_t> drops;
  std::vector<double> samples;  // per-interval CPU load
};

struct FlowResult {
  std::string flowId;
  std::uint64_t injected = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t duplicates = 0;
  std::map<std::string, std::uint64_t> reasons;
};

struct SimulationResult {
  double duration = 0;
  std::uint64_t seed = 0;
  std::vector<NodeResult> nodes;  // model order
  std::vector<FlowResult> flows;  // spec order

  const NodeResult* node(const std::string& id) const;
  const FlowResult* flow(const std::string& id) const;

  nlohmann::json toJson() const;
  std::string toCsv() const;
};

// Runs the traffic on the network (1 ms ticks). Counters are reset first.
// Throws Error{UnprovisionedTarget} for unknown endpoints or services.
SimulationResult runScenario(Network& net, const std::vector<TrafficSpec>& traffic, const ScenarioOptions& options);

}  // namespace oshi::netsim
