#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oshi/netsim/network.hpp"

namespace oshi::ctrl {

using netsim::PortId;

struct DiscoveredEdge {
  std::string nodeA;
  PortId portA;
  std::string nodeB;
  PortId portB;
  std::uint64_t lastSeen = 0;

  bool operator==(const DiscoveredEdge&) const = default;
};

// Layer-2 view of the OSHI core as learned through LLDP.
class DiscoveredGraph {
 public:
  std::vector<std::string> vertices;  // sorted
  std::vector<DiscoveredEdge> edges;  // (nodeA, portA) < (nodeB, portB), sorted

  struct Adjacent {
    std::string node;
    PortId localPort;
    PortId remotePort;
  };

  bool hasVertex(const std::string& v) const;
  // Neighbors of v sorted by (node, localPort).
  const std::vector<Adjacent>& adjacent(const std::string& v) const;
  void addEdge(DiscoveredEdge e);
  void addVertex(const std::string& v);
  // Rebuilds the adjacency index (after direct edits of `edges`).
  void reindex();

  nlohmann::json toJson() const;

 private:
  std::map<std::string, std::vector<Adjacent>> adj_;
};

inline const std::string kLldpMulticast = "01:80:c2:00:00:0e";

netsim::Frame makeLldpProbe(const std::string& node, const PortId& port);

// Emits one probe per (OSHI node, physical port) and builds the graph from
// the packet-ins the probes trigger.
DiscoveredGraph discover(netsim::Network& net, std::uint64_t tick = 0);

struct PathHop {
  std::string node;
  PortId inPort;   // empty at the first hop
  PortId outPort;  // empty at the last hop

  bool operator==(const PathHop&) const = default;
};
using SbpPath = std::vector<PathHop>;

// Minimum-hop path; among equal-length paths the lexicographically smallest
// node sequence, parallel links by smallest local port. Throws Error{NoPath}.
SbpPath computeSbpPath(const DiscoveredGraph& graph, const std::string& from, const std::string& to);

// Hop distances to `target` (absent = unreachable).
std::map<std::string, int> hopDistances(const DiscoveredGraph& graph, const std::string& target);

}  // namespace oshi::ctrl
