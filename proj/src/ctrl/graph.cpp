#include "oshi/ctrl/graph.hpp"

#include <algorithm>
#include <deque>
#include <tuple>

#include "oshi/error.hpp"

namespace oshi::ctrl {

bool DiscoveredGraph::hasVertex(const std::string& v) const {
  return std::binary_search(vertices.begin(), vertices.end(), v);
}

const std::vector<DiscoveredGraph::Adjacent>& DiscoveredGraph::adjacent(const std::string& v) const {
  static const std::vector<Adjacent> kNone;
  auto it = adj_.find(v);
  return it == adj_.end() ? kNone : it->second;
}

void DiscoveredGraph::addVertex(const std::string& v) {
  auto it = std::lower_bound(vertices.begin(), vertices.end(), v);
  if (it == vertices.end() || *it != v) vertices.insert(it, v);
}

void DiscoveredGraph::addEdge(DiscoveredEdge e) {
  if (std::tie(e.nodeB, e.portB) < std::tie(e.nodeA, e.portA)) {
    std::swap(e.nodeA, e.nodeB);
    std::swap(e.portA, e.portB);
  }
  addVertex(e.nodeA);
  addVertex(e.nodeB);
  auto key = [](const DiscoveredEdge& x) { return std::tie(x.nodeA, x.portA, x.nodeB, x.portB); };
  auto it = std::lower_bound(edges.begin(), edges.end(), e, [&](const auto& a, const auto& b) { return key(a) < key(b); });
  if (it != edges.end() && key(*it) == key(e)) {
    it->lastSeen = std::max(it->lastSeen, e.lastSeen);
    return;
  }
  edges.insert(it, e);
  reindex();
}

void DiscoveredGraph::reindex() {
  adj_.clear();
  for (const auto& e : edges) {
    adj_[e.nodeA].push_back({e.nodeB, e.portA, e.portB});
    adj_[e.nodeB].push_back({e.nodeA, e.portB, e.portA});
  }
  for (auto& [v, list] : adj_)
    std::sort(list.begin(), list.end(),
              [](const Adjacent& a, const Adjacent& b) { return std::tie(a.node, a.localPort) < std::tie(b.node, b.localPort); });
}

nlohmann::json DiscoveredGraph::toJson() const {
  nlohmann::json e = nlohmann::json::array();
  for (const auto& x : edges)
    e.push_back({{"a", {{"node", x.nodeA}, {"port", x.portA}}}, {"b", {{"node", x.nodeB}, {"port", x.portB}}}, {"lastSeen", x.lastSeen}});
  return {{"vertices", vertices}, {"edges", e}};
}

netsim::Frame makeLldpProbe(const std::string& node, const PortId& port) {
  std::string text = node + "\n" + port;
  return netsim::makeEthernetFrame(netsim::MacAddr{}, *netsim::MacAddr::parse(kLldpMulticast), netsim::kEthLldp,
                                   netsim::Bytes(text.begin(), text.end()));
}

DiscoveredGraph discover(netsim::Network& net, std::uint64_t tick) {
  DiscoveredGraph g;
  for (const auto& id : net.oshiIds()) {
    g.addVertex(id);
    for (const auto& port : net.oshi(id).physicalPorts) {
      auto trace = net.packetOut(id, port, makeLldpProbe(id, port));
      for (const auto& pin : trace.packetIns) {
        if (pin.frame.ethertype != netsim::kEthLldp || pin.frame.payload.isFrame()) continue;
        const auto& b = pin.frame.payload.bytes();
        std::string text(b.begin(), b.end());
        auto nl = text.find('\n');
        if (nl == std::string::npos) continue;
        g.addEdge({text.substr(0, nl), text.substr(nl + 1), pin.node, pin.inPort, tick});
      }
    }
  }
  return g;
}

std::map<std::string, int> hopDistances(const DiscoveredGraph& graph, const std::string& target) {
  std::map<std::string, int> dist;
  if (!graph.hasVertex(target)) return dist;
  std::deque<std::string> q{target};
  dist[target] = 0;
  while (!q.empty()) {
    auto u = q.front();
    q.pop_front();
    for (const auto& a : graph.adjacent(u)) {
      if (dist.count(a.node)) continue;
      dist[a.node] = dist[u] + 1;
      q.push_back(a.node);
    }
  }
  return dist;
}

SbpPath computeSbpPath(const DiscoveredGraph& graph, const std::string& from, const std::string& to) {
  auto dist = hopDistances(graph, to);
  if (!graph.hasVertex(from) || !dist.count(from))
    throw Error(ErrorCode::NoPath, "no path from " + from + " to " + to, from + "->" + to);
  SbpPath path;
  std::string cur = from;
  PortId in;
  while (cur != to) {
    const int d = dist.at(cur);
    // Adjacency is sorted by (node, port): the first closer neighbor wins.
    const auto& adj = graph.adjacent(cur);
    auto next = std::find_if(adj.begin(), adj.end(), [&](const auto& a) {
      auto it = dist.find(a.node);
      return it != dist.end() && it->second == d - 1;
    });
    path.push_back({cur, in, next->localPort});
    in = next->remotePort;
    cur = next->node;
  }
  path.push_back({cur, in, ""});
  return path;
}

}  // namespace oshi::ctrl
