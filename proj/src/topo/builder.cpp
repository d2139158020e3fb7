#include "oshi/topo/builder.hpp"

#include "oshi/error.hpp"
#include "oshi/topo/addressing.hpp"

namespace oshi::topo {

TopologyBuilder::TopologyBuilder(std::string modelName) { m_.modelName = std::move(modelName); }

TopologyBuilder& TopologyBuilder::node(const std::string& id, NodeKind kind) {
  m_.nodes.push_back({id, kind, id, {}, {}});
  return *this;
}

std::string TopologyBuilder::link(const std::string& a, const std::string& b, int costMetric) {
  const auto* na = m_.findNode(a);
  const auto* nb = m_.findNode(b);
  if (!na || !nb) throw Error(ErrorCode::InvalidArgument, "link endpoint not declared", na ? b : a);
  LinkKind kind = LinkKind::Core;
  if (na->kind == NodeKind::CustomerEdge || nb->kind == NodeKind::CustomerEdge) kind = LinkKind::Access;
  if (na->kind == NodeKind::Controller || nb->kind == NodeKind::Controller) kind = LinkKind::Control;
  std::string id = "l" + std::to_string(m_.links.size() + 1);
  m_.links.push_back({id, {a, "eth" + std::to_string(nextPort_[a]++)}, {b, "eth" + std::to_string(nextPort_[b]++)},
                      kind, costMetric});
  return id;
}

std::string TopologyBuilder::portTowards(const std::string& node, const std::string& peer) const {
  for (const auto& l : m_.links) {
    if (l.a.node == node && l.b.node == peer) return l.a.port;
    if (l.b.node == node && l.a.node == peer) return l.b.port;
  }
  throw Error(ErrorCode::InvalidArgument, node + " has no link to " + peer, node);
}

AccessEndpoint TopologyBuilder::endpointFor(const std::string& ce, std::optional<int> vlan) const {
  for (const auto& l : m_.links) {
    if (l.kind != LinkKind::Access || !l.touches(ce)) continue;
    const auto& pe = l.peerOf(ce);
    return {pe.node, pe.port, vlan};
  }
  throw Error(ErrorCode::InvalidArgument, ce + " has no access link", ce);
}

TopologyBuilder& TopologyBuilder::service(const std::string& id, ServiceKind kind, std::vector<AccessEndpoint> endpoints,
                                          std::map<std::string, std::string> options) {
  m_.services.push_back({id, kind, std::move(endpoints), std::move(options)});
  return *this;
}

TopologyModel TopologyBuilder::build() const {
  TopologyModel m = m_;
  std::string ctl;
  for (const auto& n : m.nodes)
    if (n.kind == NodeKind::Controller) {
      ctl = n.id;
      break;
    }
  if (!ctl.empty())
    for (const auto& n : m.nodes)
      if (isOshi(n.kind)) m.controllerAssignment[n.id] = ctl;
  assignMacs(m);
  return m;
}

TopologyModel builtinPair() {
  TopologyBuilder b("pair");
  b.ce("ce1").pe("pe1").pe("pe2").ce("ce2").controller("ctl1");
  b.link("ce1", "pe1");
  b.link("pe1", "pe2");
  b.link("pe2", "ce2");
  b.link("pe1", "ctl1");
  return b.build();
}

TopologyModel builtinChain() {
  TopologyBuilder b("chain");
  b.ce("ce1").pe("pe1").cr("cr1").pe("pe2").ce("ce2").controller("ctl1");
  b.link("ce1", "pe1");
  b.link("pe1", "cr1");
  b.link("cr1", "pe2");
  b.link("pe2", "ce2");
  b.link("pe1", "ctl1");
  return b.build();
}

}  // namespace oshi::topo
