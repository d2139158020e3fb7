#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "oshi/netsim/node.hpp"
#include "oshi/topo/addressing.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::netsim {

using FibMap = std::map<std::string, Fib>;

// Weighted graph over the OSHI nodes (core links only), in node-list order.
struct SpfGraph {
  struct Edge {
    int to;
    std::int64_t weight;
    std::string linkId;
    PortId localPort;
  };
  std::vector<std::string> ids;
  std::map<std::string, int> index;
  std::vector<std::vector<Edge>> adj;

  static SpfGraph fromModel(const topo::TopologyModel& model);
};

inline constexpr std::int64_t kUnreachable = INT64_MAX / 4;

// All-pairs distances, row-major n x n. Per-source Dijkstra, sources in
// parallel (OpenMP).
std::vector<std::int64_t> allPairsDijkstra(const SpfGraph& g);
// Serial Floyd-Warshall reference.
std::vector<std::int64_t> allPairsFloydWarshall(const SpfGraph& g);

// Per-OSHI-node FIBs: one entry per other OSHI loopback and per link prefix.
// Next hop = neighbor minimizing (link weight + distance), ties by neighbor
// id then local port. Throws Error{DisconnectedCore}.
FibMap computeFibs(const topo::TopologyModel& model);
FibMap computeFibsSerial(const topo::TopologyModel& model);
// Same, but unreachable destinations are simply omitted.
FibMap computeFibsPartitioned(const topo::TopologyModel& model);

}  // namespace oshi::netsim
