#include "oshi/topo/generate.hpp"

#include <map>
#include <numeric>

#include "oshi/error.hpp"
#include "oshi/topo/addressing.hpp"
#include "oshi/util/rng.hpp"

namespace oshi::topo {

TopologyModel generateRandom(int nCore, int nPe, int nCePerPe, double extraEdgeProb, std::uint64_t seed) {
  if (nCore < 1 || nPe < 1 || nCePerPe < 0)
    throw Error(ErrorCode::InvalidArgument, "need nCore >= 1, nPe >= 1, nCePerPe >= 0");
  if (!(extraEdgeProb >= 0.0 && extraEdgeProb <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "extraEdgeProb must be in [0, 1]");

  util::DetRng rng(seed);
  TopologyModel m;
  m.modelName = "random-" + std::to_string(seed);

  std::vector<std::string> oshi;
  for (int i = 1; i <= nCore; ++i) {
    m.nodes.push_back({"cr" + std::to_string(i), NodeKind::CoreRouter, "CR " + std::to_string(i), {}, {}});
    oshi.push_back(m.nodes.back().id);
  }
  for (int i = 1; i <= nPe; ++i) {
    m.nodes.push_back({"pe" + std::to_string(i), NodeKind::ProviderEdge, "PE " + std::to_string(i), {}, {}});
    oshi.push_back(m.nodes.back().id);
  }

  std::map<std::string, int> nextPort;
  auto port = [&](const std::string& node) { return "eth" + std::to_string(nextPort[node]++); };
  int linkSeq = 0;
  auto addLink = [&](const std::string& a, const std::string& b, LinkKind kind) {
    m.links.push_back({"l" + std::to_string(++linkSeq), {a, port(a)}, {b, port(b)}, kind, 1});
  };

  // Random spanning tree: shuffle, then attach each vertex to a random earlier one.
  std::vector<std::size_t> order(oshi.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
  std::vector<std::vector<bool>> adjacent(oshi.size(), std::vector<bool>(oshi.size(), false));
  for (std::size_t i = 1; i < order.size(); ++i) {
    const std::size_t parent = order[rng.below(i)];
    const std::size_t child = order[i];
    adjacent[parent][child] = adjacent[child][parent] = true;
    addLink(oshi[std::min(parent, child)], oshi[std::max(parent, child)], LinkKind::Core);
  }
  for (std::size_t i = 0; i < oshi.size(); ++i) {
    for (std::size_t j = i + 1; j < oshi.size(); ++j) {
      if (adjacent[i][j]) continue;
      if (rng.uniform01() < extraEdgeProb) addLink(oshi[i], oshi[j], LinkKind::Core);
    }
  }

  int ceSeq = 0;
  for (int p = 1; p <= nPe; ++p) {
    const std::string pe = "pe" + std::to_string(p);
    for (int k = 0; k < nCePerPe; ++k) {
      const std::string ce = "ce" + std::to_string(++ceSeq);
      m.nodes.push_back({ce, NodeKind::CustomerEdge, "CE " + std::to_string(ceSeq), {}, {}});
      addLink(pe, ce, LinkKind::Access);
    }
  }

  m.nodes.push_back({"ctl1", NodeKind::Controller, "Controller", {}, {}});
  addLink("cr1", "ctl1", LinkKind::Control);
  for (const auto& id : oshi) m.controllerAssignment[id] = "ctl1";

  assignMacs(m);
  return m;
}

}  // namespace oshi::topo
