#include "oshi/ctrl/steiner.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>

#include "oshi/error.hpp"
#include "oshi/util/rng.hpp"

namespace oshi::ctrl {

namespace {

constexpr std::int64_t kInf = INT64_MAX / 4;

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

WeightedEdge normalized(std::string a, std::string b, std::int64_t w) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b), w};
}

// Kruskal over edges ordered by (w, u, v).
std::vector<WeightedEdge> kruskal(const std::vector<std::string>& vertices, std::vector<WeightedEdge> edges) {
  std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
    return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
  });
  std::map<std::string, int> idx;
  for (const auto& v : vertices) idx.emplace(v, static_cast<int>(idx.size()));
  Dsu dsu(idx.size());
  std::vector<WeightedEdge> tree;
  for (auto& e : edges)
    if (dsu.unite(idx.at(e.u), idx.at(e.v))) tree.push_back(std::move(e));
  return tree;
}

std::vector<std::int64_t> dijkstra(const WeightedGraph& g, int src) {
  std::vector<std::int64_t> dist(g.size(), kInf);
  using Item = std::pair<std::int64_t, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0;
  pq.push({0, src});
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d != dist[u]) continue;
    for (const auto& a : g.arcs(u))
      if (d + a.w < dist[a.to]) {
        dist[a.to] = d + a.w;
        pq.push({dist[a.to], a.to});
      }
  }
  return dist;
}

// Greedy walk toward `to` given distances from `to`.
std::vector<int> walk(const WeightedGraph& g, int from, int to, const std::vector<std::int64_t>& distTo) {
  std::vector<int> path{from};
  int cur = from;
  while (cur != to) {
    for (const auto& a : g.arcs(cur)) {
      if (distTo[a.to] < kInf && a.w + distTo[a.to] == distTo[cur]) {
        cur = a.to;
        break;
      }
    }
    path.push_back(cur);
  }
  return path;
}

SteinerTree makeTree(std::vector<WeightedEdge> edges, const std::vector<std::string>& isolated) {
  SteinerTree t;
  std::sort(edges.begin(), edges.end());
  for (const auto& e : edges) {
    t.vertices.insert(e.u);
    t.vertices.insert(e.v);
    t.cost += e.w;
  }
  for (const auto& v : isolated) t.vertices.insert(v);
  t.edges = std::move(edges);
  return t;
}

}  // namespace

WeightedGraph::WeightedGraph(std::vector<std::string> vertices, const std::vector<WeightedEdge>& edges)
    : ids_(std::move(vertices)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  std::map<std::pair<std::string, std::string>, std::int64_t> best;
  for (const auto& e : edges) {
    if (e.u == e.v) continue;
    if (index(e.u) < 0 || index(e.v) < 0) throw Error(ErrorCode::InvalidArgument, "edge endpoint not in graph", e.u + "-" + e.v);
    auto n = normalized(e.u, e.v, e.w);
    auto [it, inserted] = best.try_emplace({n.u, n.v}, n.w);
    if (!inserted) it->second = std::min(it->second, n.w);
  }
  adj_.resize(ids_.size());
  for (const auto& [uv, w] : best) {
    edges_.push_back({uv.first, uv.second, w});
    int a = index(uv.first), b = index(uv.second);
    adj_[a].push_back({b, w});
    adj_[b].push_back({a, w});
  }
  for (auto& list : adj_) std::sort(list.begin(), list.end(), [](const Arc& x, const Arc& y) { return x.to < y.to; });
}

WeightedGraph WeightedGraph::fromDiscovered(const DiscoveredGraph& g) {
  std::vector<WeightedEdge> edges;
  for (const auto& e : g.edges) edges.push_back({e.nodeA, e.nodeB, 1});
  return WeightedGraph(g.vertices, edges);
}

int WeightedGraph::index(const std::string& v) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
  return it != ids_.end() && *it == v ? static_cast<int>(it - ids_.begin()) : -1;
}

int SteinerTree::degree(const std::string& v) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [&](const WeightedEdge& e) { return e.u == v || e.v == v; }));
}

bool SteinerTree::isPath() const {
  return std::all_of(vertices.begin(), vertices.end(), [&](const std::string& v) { return degree(v) <= 2; });
}

std::vector<std::string> shortestPath(const WeightedGraph& g, const std::string& from, const std::string& to) {
  int s = g.index(from), t = g.index(to);
  if (s < 0 || t < 0) return {};
  auto dist = dijkstra(g, t);
  if (dist[s] >= kInf) return {};
  std::vector<std::string> out;
  for (int v : walk(g, s, t, dist)) out.push_back(g.vertices()[v]);
  return out;
}

SteinerTree kmbSteiner(const WeightedGraph& g, const std::vector<std::string>& terminalList) {
  std::vector<std::string> terminals = terminalList;
  std::sort(terminals.begin(), terminals.end());
  terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
  for (const auto& t : terminals)
    if (g.index(t) < 0) throw Error(ErrorCode::InvalidArgument, "terminal not in graph: " + t, t);
  if (terminals.size() <= 1) return makeTree({}, terminals);

  // (1) distance graph over the terminals.
  std::vector<std::vector<std::int64_t>> dist;
  for (const auto& t : terminals) dist.push_back(dijkstra(g, g.index(t)));
  std::vector<WeightedEdge> closure;
  for (std::size_t i = 0; i < terminals.size(); ++i)
    for (std::size_t j = i + 1; j < terminals.size(); ++j) {
      auto d = dist[i][g.index(terminals[j])];
      if (d >= kInf)
        throw Error(ErrorCode::DisconnectedTerminals, terminals[i] + " and " + terminals[j] + " are disconnected",
                    terminals[j]);
      closure.push_back({terminals[i], terminals[j], d});
    }
  // (2) its MST; (3) expanded into graph paths.
  std::map<std::pair<std::string, std::string>, std::int64_t> expanded;
  std::set<std::string> subVertices;
  for (const auto& e : kruskal(terminals, closure)) {
    auto ti = std::lower_bound(terminals.begin(), terminals.end(), e.v) - terminals.begin();
    auto path = walk(g, g.index(e.u), g.index(e.v), dist[ti]);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      auto n = normalized(g.vertices()[path[k]], g.vertices()[path[k + 1]], 0);
      for (const auto& a : g.arcs(path[k]))
        if (a.to == path[k + 1]) n.w = a.w;
      expanded[{n.u, n.v}] = n.w;
      subVertices.insert(n.u);
      subVertices.insert(n.v);
    }
  }
  // (4) MST of the expansion.
  std::vector<WeightedEdge> sub;
  for (const auto& [uv, w] : expanded) sub.push_back({uv.first, uv.second, w});
  auto tree = kruskal({subVertices.begin(), subVertices.end()}, sub);
  // (5) prune non-terminal leaves.
  std::set<std::string> term(terminals.begin(), terminals.end());
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::string, int> deg;
    for (const auto& e : tree) {
      ++deg[e.u];
      ++deg[e.v];
    }
    auto leaf = std::find_if(tree.begin(), tree.end(), [&](const WeightedEdge& e) {
      return (deg[e.u] == 1 && !term.count(e.u)) || (deg[e.v] == 1 && !term.count(e.v));
    });
    if (leaf != tree.end()) {
      tree.erase(leaf);
      changed = true;
    }
  }
  return makeTree(std::move(tree), terminals);
}

std::string_view toString(VssMode m) { return m == VssMode::Optimized ? "optimized" : "unoptimized"; }

VssMode parseVssMode(std::string_view text) {
  if (text == "optimized") return VssMode::Optimized;
  if (text == "unoptimized") return VssMode::Unoptimized;
  throw Error(ErrorCode::InvalidArgument, "vssMode must be optimized or unoptimized", std::string(text));
}

BranchingSelection selectBranchingPoints(const DiscoveredGraph& dg, const std::vector<std::string>& endpointList,
                                         VssMode mode, std::uint64_t seed) {
  std::vector<std::string> endpoints = endpointList;
  std::sort(endpoints.begin(), endpoints.end());
  endpoints.erase(std::unique(endpoints.begin(), endpoints.end()), endpoints.end());
  if (endpointList.size() < 2) throw Error(ErrorCode::InvalidArgument, "a VSS needs at least 2 endpoints");
  const auto g = WeightedGraph::fromDiscovered(dg);
  BranchingSelection out;

  if (mode == VssMode::Unoptimized) {
    if (g.size() == 0) throw Error(ErrorCode::DisconnectedTerminals, "empty core");
    util::DetRng rng(seed);
    const auto& root = g.vertices()[rng.below(g.size())];
    std::vector<WeightedEdge> edges;
    for (const auto& e : endpoints) {
      auto path = shortestPath(g, e, root);
      if (path.empty()) throw Error(ErrorCode::DisconnectedTerminals, e + " cannot reach " + root, e);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) edges.push_back(normalized(path[k], path[k + 1], 1));
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    out.tree = makeTree(std::move(edges), {root});
    for (const auto& e : endpoints) out.tree.vertices.insert(e);
    out.branchingPoints = {root};
    return out;
  }

  out.tree = kmbSteiner(g, endpoints);
  if (out.tree.isPath()) {
    // Order the path from its smaller end and take the middle vertex.
    std::vector<std::string> ends;
    for (const auto& v : out.tree.vertices)
      if (out.tree.degree(v) <= 1) ends.push_back(v);
    std::vector<std::string> order{ends.front()};
    while (order.size() < out.tree.vertices.size()) {
      for (const auto& e : out.tree.edges) {
        const std::string* next = e.u == order.back() ? &e.v : e.v == order.back() ? &e.u : nullptr;
        if (next && (order.size() < 2 || *next != order[order.size() - 2])) {
          order.push_back(*next);
          break;
        }
      }
    }
    out.branchingPoints = {order[(order.size() - 1) / 2]};
    return out;
  }
  std::set<std::string> term(endpoints.begin(), endpoints.end());
  for (const auto& v : out.tree.vertices) {
    int d = out.tree.degree(v);
    if (d >= 3 || (term.count(v) && d >= 2)) out.branchingPoints.insert(v);
  }
  return out;
}

}  // namespace oshi::ctrl
