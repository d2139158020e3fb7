#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "oshi/ctrl/graph.hpp"

namespace oshi::ctrl {

struct WeightedEdge {
  std::string u;  // u < v
  std::string v;
  std::int64_t w = 1;

  auto operator<=>(const WeightedEdge&) const = default;
};

// Simple undirected graph; parallel edges collapse to the lightest one.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  WeightedGraph(std::vector<std::string> vertices, const std::vector<WeightedEdge>& edges);
  // Unit weights over the discovered core.
  static WeightedGraph fromDiscovered(const DiscoveredGraph& g);

  const std::vector<std::string>& vertices() const { return ids_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }
  int index(const std::string& v) const;  // -1 if absent
  std::size_t size() const { return ids_.size(); }

  struct Arc {
    int to;
    std::int64_t w;
  };
  const std::vector<Arc>& arcs(int v) const { return adj_[v]; }

 private:
  std::vector<std::string> ids_;  // sorted
  std::vector<WeightedEdge> edges_;
  std::vector<std::vector<Arc>> adj_;  // sorted by neighbor id
};

struct SteinerTree {
  std::set<std::string> vertices;
  std::vector<WeightedEdge> edges;  // sorted
  std::int64_t cost = 0;

  int degree(const std::string& v) const;
  bool isPath() const;
  bool operator==(const SteinerTree&) const = default;
};

// Kou-Markowsky-Berman heuristic. Throws Error{DisconnectedTerminals} and
// Error{InvalidArgument} for terminals outside the graph.
SteinerTree kmbSteiner(const WeightedGraph& graph, const std::vector<std::string>& terminals);

// Shortest weighted path; among shortest paths the lexicographically
// smallest vertex sequence. Empty if unreachable.
std::vector<std::string> shortestPath(const WeightedGraph& graph, const std::string& from, const std::string& to);

enum class VssMode { Unoptimized, Optimized };
std::string_view toString(VssMode m);
VssMode parseVssMode(std::string_view text);

struct BranchingSelection {
  std::set<std::string> branchingPoints;
  SteinerTree tree;
};

// Unoptimized: one seeded-random core node, tree = shortest-path tree from it
// to the endpoints. Optimized: KMB tree; branching points are its vertices of
// degree >= 3 plus terminals of degree >= 2; a path-shaped tree gets its
// midpoint instead.
BranchingSelection selectBranchingPoints(const DiscoveredGraph& graph, const std::vector<std::string>& endpoints,
                                         VssMode mode, std::uint64_t seed);

}  // namespace oshi::ctrl
