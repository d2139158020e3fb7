#include "oshi/topo/validate.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace oshi::topo {

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(violations.begin(), violations.end(), [&](const Violation& v) { return v.code == code; });
}

nlohmann::json ValidationReport::toJson() const {
  nlohmann::json out;
  out["ok"] = ok();
  out["violations"] = nlohmann::json::array();
  for (const auto& v : violations)
    out["violations"].push_back({{"code", v.code}, {"subject", v.subject}, {"message", v.message}});
  return out;
}

namespace {

class Checker {
 public:
  explicit Checker(const TopologyModel& m) : m_(m) {}

  ValidationReport run() {
    indexNodes();
    checkLinks();
    checkCustomerEdges();
    checkControllerAssignment();
    checkCoreConnectivity();
    checkServices();
    return std::move(report_);
  }

 private:
  void add(std::string code, std::string subject, std::string message) {
    report_.violations.push_back({std::move(code), std::move(subject), std::move(message)});
  }

  const NodeSpec* node(const std::string& id) const {
    auto it = byId_.find(id);
    return it == byId_.end() ? nullptr : it->second;
  }

  void indexNodes() {
    for (const auto& n : m_.nodes) {
      if (!byId_.emplace(n.id, &n).second) add("DUPLICATE_NODE_ID", n.id, "node id is not unique");
    }
  }

  void checkLinks() {
    std::set<std::string> linkIds;
    std::map<std::pair<std::string, std::string>, std::string> portOwner;
    for (const auto& l : m_.links) {
      if (!linkIds.insert(l.id).second) add("DUPLICATE_LINK_ID", l.id, "link id is not unique");
      if (l.costMetric < 1) add("BAD_COST_METRIC", l.id, "costMetric must be a positive integer");
      for (const PortRef* end : {&l.a, &l.b}) {
        auto [it, fresh] = portOwner.emplace(std::make_pair(end->node, end->port), l.id);
        if (!fresh)
          add("DUPLICATE_PORT", l.id, "port " + end->node + ":" + end->port + " already used by " + it->second);
      }
      const NodeSpec* a = node(l.a.node);
      const NodeSpec* b = node(l.b.node);
      if (!a || !b) {
        add("DANGLING_LINK_ENDPOINT", l.id, "link references unknown node " + (!a ? l.a.node : l.b.node));
        continue;
      }
      if (l.a.node == l.b.node) {
        add("SELF_LOOP", l.id, "link connects a node to itself");
        continue;
      }
      const bool touchesCe = a->kind == NodeKind::CustomerEdge || b->kind == NodeKind::CustomerEdge;
      const bool touchesCtl = a->kind == NodeKind::Controller || b->kind == NodeKind::Controller;
      if (touchesCe || l.kind == LinkKind::Access) {
        const bool ok = l.kind == LinkKind::Access &&
                        ((a->kind == NodeKind::CustomerEdge && b->kind == NodeKind::ProviderEdge) ||
                         (b->kind == NodeKind::CustomerEdge && a->kind == NodeKind::ProviderEdge));
        if (!ok) add("ACCESS_LINK_NOT_PE", l.id, "access links must connect one CustomerEdge to one ProviderEdge");
      } else if (touchesCtl || l.kind == LinkKind::Control) {
        const bool ok = l.kind == LinkKind::Control &&
                        ((a->kind == NodeKind::Controller && isOshi(b->kind)) ||
                         (b->kind == NodeKind::Controller && isOshi(a->kind)));
        if (!ok) add("CONTROL_LINK_BAD_ENDPOINT", l.id, "control links must connect one Controller to one CR/PE");
      } else if (!isOshi(a->kind) || !isOshi(b->kind)) {
        add("CORE_LINK_BAD_ENDPOINT", l.id, "core links must connect CR/PE nodes only");
      }
    }
  }

  void checkCustomerEdges() {
    std::map<std::string, int> degree;
    for (const auto& l : m_.links) {
      ++degree[l.a.node];
      ++degree[l.b.node];
    }
    for (const auto& n : m_.nodes) {
      if (n.kind == NodeKind::CustomerEdge && degree[n.id] != 1)
        add("CE_LINK_COUNT", n.id, "a CustomerEdge must have exactly one link");
    }
  }

  void checkControllerAssignment() {
    for (const auto& n : m_.nodes) {
      if (isOshi(n.kind) && !m_.controllerAssignment.count(n.id))
        add("CONTROLLER_UNASSIGNED", n.id, "OSHI node has no controller");
    }
    for (const auto& [oshiId, ctlId] : m_.controllerAssignment) {
      const NodeSpec* o = node(oshiId);
      const NodeSpec* c = node(ctlId);
      if (!o || !isOshi(o->kind))
        add("BAD_CONTROLLER_ASSIGNMENT", oshiId, "assignment key is not a CR/PE node");
      else if (!c || c->kind != NodeKind::Controller)
        add("BAD_CONTROLLER_ASSIGNMENT", oshiId, "assigned controller " + ctlId + " is not a Controller node");
    }
  }

  void checkCoreConnectivity() {
    std::map<std::string, std::vector<std::string>> adj;
    std::vector<std::string> oshi;
    for (const auto& n : m_.nodes)
      if (isOshi(n.kind)) oshi.push_back(n.id);
    if (oshi.empty()) return;
    for (const auto& l : m_.links) {
      const NodeSpec* a = node(l.a.node);
      const NodeSpec* b = node(l.b.node);
      if (a && b && isOshi(a->kind) && isOshi(b->kind) && l.kind == LinkKind::Core) {
        adj[l.a.node].push_back(l.b.node);
        adj[l.b.node].push_back(l.a.node);
      }
    }
    std::set<std::string> seen{oshi.front()};
    std::vector<std::string> stack{oshi.front()};
    while (!stack.empty()) {
      auto v = stack.back();
      stack.pop_back();
      for (const auto& w : adj[v])
        if (seen.insert(w).second) stack.push_back(w);
    }
    for (const auto& id : oshi) {
      if (!seen.count(id)) add("CORE_DISCONNECTED", id, "node is not connected to " + oshi.front() + " by core links");
    }
  }

  void checkServices() {
    std::set<std::string> ids;
    std::set<std::tuple<std::string, std::string, std::optional<int>>> claims;
    for (const auto& s : m_.services) {
      if (!ids.insert(s.id).second) add("DUPLICATE_SERVICE_ID", s.id, "service id is not unique");
      const std::size_t n = s.endpoints.size();
      if ((s.kind == ServiceKind::Vss && n < 2) || (s.kind != ServiceKind::Vss && n != 2))
        add("SERVICE_ENDPOINT_COUNT", s.id,
            std::string(toString(s.kind)) + " service has " + std::to_string(n) + " endpoints");
      if (s.kind == ServiceKind::Vss) {
        auto it = s.options.find("vssMode");
        if (it != s.options.end() && it->second != "optimized" && it->second != "unoptimized")
          add("BAD_SERVICE_OPTION", s.id, "vssMode must be optimized or unoptimized");
      }
      for (const auto& ep : s.endpoints) {
        const NodeSpec* pe = node(ep.pe);
        const LinkSpec* link = m_.linkAt(ep.pe, ep.port);
        if (!pe || pe->kind != NodeKind::ProviderEdge || !link || link->kind != LinkKind::Access)
          add("SERVICE_ENDPOINT_NOT_ACCESS", s.id, "endpoint " + ep.pe + ":" + ep.port + " is not a PE access port");
        if (ep.vlan && (*ep.vlan < 1 || *ep.vlan > 4094))
          add("VLAN_OUT_OF_RANGE", s.id, "VLAN id must be in 1..4094");
        if (!claims.emplace(ep.pe, ep.port, ep.vlan).second)
          add("DUPLICATE_VLAN_CLAIM", s.id, "endpoint " + ep.ofcsPort() + " on " + ep.pe + " is already claimed");
      }
    }
  }

  const TopologyModel& m_;
  std::map<std::string, const NodeSpec*> byId_;
  ValidationReport report_;
};

}  // namespace

ValidationReport validate(const TopologyModel& model) { return Checker(model).run(); }

}  // namespace oshi::topo
