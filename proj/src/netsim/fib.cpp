#include "oshi/netsim/fib.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "oshi/error.hpp"

namespace oshi::netsim {

SpfGraph SpfGraph::fromModel(const topo::TopologyModel& model) {
  SpfGraph g;
  for (const auto& n : model.nodes) {
    if (!topo::isOshi(n.kind)) continue;
    g.index[n.id] = static_cast<int>(g.ids.size());
    g.ids.push_back(n.id);
  }
  g.adj.resize(g.ids.size());
  for (const auto& l : model.links) {
    if (l.kind != topo::LinkKind::Core) continue;
    auto ia = g.index.find(l.a.node), ib = g.index.find(l.b.node);
    if (ia == g.index.end() || ib == g.index.end()) continue;
    g.adj[ia->second].push_back({ib->second, l.costMetric, l.id, l.a.port});
    g.adj[ib->second].push_back({ia->second, l.costMetric, l.id, l.b.port});
  }
  return g;
}

namespace {

void dijkstraFrom(const SpfGraph& g, int src, std::int64_t* dist) {
  const int n = static_cast<int>(g.ids.size());
  std::fill(dist, dist + n, kUnreachable);
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (const auto& e : g.adj[u]) {
      if (d + e.weight < dist[e.to]) {
        dist[e.to] = d + e.weight;
        pq.push({dist[e.to], e.to});
      }
    }
  }
}

}  // namespace

std::vector<std::int64_t> allPairsDijkstra(const SpfGraph& g) {
  const int n = static_cast<int>(g.ids.size());
  std::vector<std::int64_t> dist(static_cast<std::size_t>(n) * n);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < n; ++s) dijkstraFrom(g, s, dist.data() + static_cast<std::size_t>(s) * n);
  return dist;
}

std::vector<std::int64_t> allPairsFloydWarshall(const SpfGraph& g) {
  const std::size_t n = g.ids.size();
  std::vector<std::int64_t> d(n * n, kUnreachable);
  for (std::size_t i = 0; i < n; ++i) {
    d[i * n + i] = 0;
    for (const auto& e : g.adj[i]) d[i * n + e.to] = std::min(d[i * n + e.to], e.weight);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      if (d[i * n + k] >= kUnreachable) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (d[k * n + j] >= kUnreachable) continue;
        d[i * n + j] = std::min(d[i * n + j], d[i * n + k] + d[k * n + j]);
      }
    }
  return d;
}

namespace {

// A routed destination: a prefix attached to one or two OSHI nodes.
struct Destination {
  Ipv4Prefix prefix;
  std::vector<int> attach;  // OSHI node indices where the prefix is local
  const topo::LinkSpec* link = nullptr;
};

std::vector<Destination> destinations(const topo::TopologyModel& model, const topo::Addressing& addr,
                                      const SpfGraph& g) {
  std::vector<Destination> out;
  for (std::size_t i = 0; i < g.ids.size(); ++i)
    out.push_back({Ipv4Prefix{addr.loopback(g.ids[i]), 32}, {static_cast<int>(i)}, nullptr});
  for (const auto& l : model.links) {
    Destination d{addr.linkPrefix(l.id), {}, &l};
    for (const auto* end : {&l.a, &l.b}) {
      auto it = g.index.find(end->node);
      if (it != g.index.end()) d.attach.push_back(it->second);
    }
    if (!d.attach.empty()) out.push_back(std::move(d));
  }
  return out;
}

FibMap buildFibs(const topo::TopologyModel& model, const SpfGraph& g, const std::vector<std::int64_t>& dist,
                 bool allowPartition, bool parallel) {
  topo::Addressing addr(model);
  const auto dests = destinations(model, addr, g);
  const int n = static_cast<int>(g.ids.size());

  if (!allowPartition) {
    for (int j = 1; j < n; ++j)
      if (dist[j] >= kUnreachable) throw Error(ErrorCode::DisconnectedCore, "core graph is disconnected", g.ids[j]);
  }

  std::vector<Fib> fibs(n);
  auto build = [&](int s) {
    Fib& fib = fibs[s];
    for (const auto& d : dests) {
      bool local = std::find(d.attach.begin(), d.attach.end(), s) != d.attach.end();
      if (local) {
        if (!d.link) continue;  // own loopback
        const auto& self = d.link->endOf(g.ids[s]);
        const auto& peer = d.link->peerOf(g.ids[s]);
        fib.push_back({d.prefix, peer.node, self.port, addr.interfaceMac(peer.node, peer.port), true});
        continue;
      }
      auto distTo = [&](int from) {
        std::int64_t best = kUnreachable;
        for (int a : d.attach) best = std::min(best, dist[static_cast<std::size_t>(from) * n + a]);
        return best;
      };
      const SpfGraph::Edge* chosen = nullptr;
      std::int64_t chosenCost = kUnreachable;
      for (const auto& e : g.adj[s]) {
        std::int64_t rest = distTo(e.to);
        if (rest >= kUnreachable) continue;
        std::int64_t c = e.weight + rest;
        if (!chosen || std::tie(c, g.ids[e.to], e.localPort) < std::tie(chosenCost, g.ids[chosen->to], chosen->localPort)) {
          chosen = &e;
          chosenCost = c;
        }
      }
      if (!chosen) continue;
      const auto* link = model.findLink(chosen->linkId);
      const auto& peer = link->peerOf(g.ids[s]);
      fib.push_back({d.prefix, peer.node, chosen->localPort, addr.interfaceMac(peer.node, peer.port), false});
    }
    sortFib(fib);
  };
  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n; ++s) build(s);
  } else {
    for (int s = 0; s < n; ++s) build(s);
  }
  FibMap out;
  for (int s = 0; s < n; ++s) out[g.ids[s]] = std::move(fibs[s]);
  return out;
}

}  // namespace

FibMap computeFibs(const topo::TopologyModel& model) {
  auto g = SpfGraph::fromModel(model);
  return buildFibs(model, g, allPairsDijkstra(g), false, true);
}

FibMap computeFibsSerial(const topo::TopologyModel& model) {
  auto g = SpfGraph::fromModel(model);
  return buildFibs(model, g, allPairsFloydWarshall(g), false, false);
}

FibMap computeFibsPartitioned(const topo::TopologyModel& model) {
  auto g = SpfGraph::fromModel(model);
  return buildFibs(model, g, allPairsDijkstra(g), true, true);
}

}  // namespace oshi::netsim
