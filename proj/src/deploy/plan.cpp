#include "oshi/deploy/plan.hpp"

#include <algorithm>
#include <set>

#include "oshi/error.hpp"
#include "oshi/netsim/flow.hpp"
#include "oshi/netsim/node.hpp"
#include "oshi/topo/addressing.hpp"

namespace oshi::deploy {

const Vm* ResourcePool::find(const std::string& vmId) const {
  auto it = std::find_if(vms.begin(), vms.end(), [&](const Vm& v) { return v.vmId == vmId; });
  return it == vms.end() ? nullptr : &*it;
}

ResourcePool ResourcePool::fromJson(const nlohmann::json& j) {
  const nlohmann::json* list = &j;
  std::string base;
  if (j.is_object()) {
    if (!j.contains("vms")) throw Error(ErrorCode::SchemaViolation, "missing vms", "/vms");
    list = &j.at("vms");
    base = "/vms";
  }
  if (!list->is_array()) throw Error(ErrorCode::SchemaViolation, "resource file must be a list of VMs", base.empty() ? "/" : base);
  ResourcePool pool;
  std::set<std::string> ids;
  std::set<topo::Ipv4Addr> addrs;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const auto& e = (*list)[i];
    const auto path = base + "/" + std::to_string(i);
    for (const char* key : {"vmId", "mgmtAddress"})
      if (!e.is_object() || !e.contains(key) || !e.at(key).is_string())
        throw Error(ErrorCode::SchemaViolation, std::string("missing or non-string ") + key, path + "/" + key);
    Vm vm;
    vm.vmId = e.at("vmId").get<std::string>();
    auto ip = topo::Ipv4Addr::parse(e.at("mgmtAddress").get<std::string>());
    if (!ip) throw Error(ErrorCode::SchemaViolation, "bad mgmtAddress", path + "/mgmtAddress");
    vm.mgmtAddress = *ip;
    if (e.contains("server")) {
      if (!e.at("server").is_string()) throw Error(ErrorCode::SchemaViolation, "server must be a string", path + "/server");
      vm.server = e.at("server").get<std::string>();
    }
    if (!ids.insert(vm.vmId).second) throw Error(ErrorCode::SchemaViolation, "duplicate vmId " + vm.vmId, path + "/vmId");
    if (!addrs.insert(vm.mgmtAddress).second)
      throw Error(ErrorCode::SchemaViolation, "duplicate mgmtAddress " + vm.mgmtAddress.str(), path + "/mgmtAddress");
    pool.vms.push_back(std::move(vm));
  }
  return pool;
}

nlohmann::json ResourcePool::toJson() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : vms) j.push_back({{"vmId", v.vmId}, {"mgmtAddress", v.mgmtAddress.str()}, {"server", v.server}});
  return j;
}

ResourcePool ResourcePool::synthetic(std::size_t n) {
  ResourcePool pool;
  for (std::size_t i = 1; i <= n; ++i)
    pool.vms.push_back({"vm" + std::to_string(i),
                        topo::Ipv4Addr{topo::Ipv4Addr::fromOctets(192, 168, 100, 0).value + static_cast<std::uint32_t>(i)},
                        i % 2 ? "server-a" : "server-b"});
  return pool;
}

Mapping mapNodes(const topo::TopologyModel& model, const ResourcePool& pool, const Mapping& overrides) {
  Mapping out;
  std::set<std::string> used;
  for (const auto& [node, vm] : overrides) {
    if (!model.findNode(node)) throw Error(ErrorCode::InvalidArgument, "override for unknown node " + node, node);
    if (!pool.find(vm)) throw Error(ErrorCode::UnknownVm, "unknown VM " + vm, vm);
    if (!used.insert(vm).second) throw Error(ErrorCode::ConflictingOverrides, "VM " + vm + " pinned twice", vm);
    out[node] = vm;
  }
  std::vector<std::string> rest;
  for (const auto& n : model.nodes)
    if (!out.count(n.id)) rest.push_back(n.id);
  std::sort(rest.begin(), rest.end());
  auto next = pool.vms.begin();
  for (const auto& node : rest) {
    while (next != pool.vms.end() && used.count(next->vmId)) ++next;
    if (next == pool.vms.end())
      throw Error(ErrorCode::InsufficientVms,
                  std::to_string(model.nodes.size()) + " nodes need VMs, pool has " + std::to_string(pool.vms.size()),
                  node);
    out[node] = next->vmId;
    used.insert(next->vmId);
  }
  return out;
}

std::string_view toString(TunnelKind k) { return k == TunnelKind::Vxlan ? "vxlan" : "userspace"; }

TunnelKind parseTunnelKind(std::string_view text) {
  if (text == "vxlan") return TunnelKind::Vxlan;
  if (text == "userspace") return TunnelKind::Userspace;
  throw Error(ErrorCode::UnknownKind, "unknown tunnel kind " + std::string(text), std::string(text));
}

std::vector<Tunnel> planOverlay(const topo::TopologyModel& model, const Mapping& mapping, TunnelKind kind) {
  std::vector<const topo::LinkSpec*> links;
  for (const auto& l : model.links) links.push_back(&l);
  std::sort(links.begin(), links.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  std::vector<Tunnel> out;
  for (const auto* l : links) {
    auto vmOf = [&](const std::string& node) {
      auto it = mapping.find(node);
      if (it == mapping.end()) throw Error(ErrorCode::UnmappedNode, "node " + node + " has no VM", node);
      return it->second;
    };
    out.push_back({l->id, static_cast<std::uint32_t>(out.size() + 1), {vmOf(l->a.node), vmOf(l->b.node)}, kind});
  }
  return out;
}

int overheadOf(std::string_view kind) {
  if (kind == "vxlan") return 14 + 20 + 8 + 8;
  if (kind == "pw-gre") return 20 + 4;
  if (kind == "eompls-reference") return 14 + 4;
  if (kind == "userspace") return 14 + 20 + 8;
  throw Error(ErrorCode::UnknownKind, "unknown encapsulation kind " + std::string(kind), std::string(kind));
}

nlohmann::json DeploymentPlan::toJson() const {
  nlohmann::json t = nlohmann::json::array();
  for (const auto& x : tunnels)
    t.push_back({{"linkId", x.linkId}, {"vni", x.vni}, {"endpoints", {x.endpoints.first, x.endpoints.second}}, {"kind", toString(x.kind)}});
  nlohmann::json c = nlohmann::json::object();
  for (const auto& [node, doc] : nodeConfigs) c[node] = doc.toJson();
  return {{"mapping", mapping}, {"tunnels", t}, {"nodeConfigs", c}, {"overheadBytesPerPacket", overheadBytesPerPacket}};
}

namespace {

std::string roleName(topo::NodeKind k) {
  switch (k) {
    case topo::NodeKind::CoreRouter: return "CR";
    case topo::NodeKind::ProviderEdge: return "PE";
    case topo::NodeKind::CustomerEdge: return "CE";
    case topo::NodeKind::Controller: return "controller";
  }
  return "";
}

}  // namespace

std::map<std::string, ConfigDoc> emitConfigs(const topo::TopologyModel& model, const DeploymentPlan& plan,
                                             const ResourcePool& pool) {
  topo::Addressing addr(model);
  std::map<std::string, const Tunnel*> tunnelOf;
  for (const auto& t : plan.tunnels) tunnelOf[t.linkId] = &t;
  auto mgmt = [&](const std::string& node) -> std::string {
    auto it = plan.mapping.find(node);
    if (it == plan.mapping.end()) throw Error(ErrorCode::UnmappedNode, "node " + node + " has no VM", node);
    const Vm* vm = pool.find(it->second);
    if (!vm) throw Error(ErrorCode::UnknownVm, "unknown VM " + it->second, it->second);
    return vm->mgmtAddress.str();
  };

  std::map<std::string, ConfigDoc> out;
  for (const auto& n : model.nodes) {
    ConfigDoc doc;
    const bool oshi = topo::isOshi(n.kind);
    doc.setup.push_back({{"op", "install-role"}, {"role", roleName(n.kind)}});
    nlohmann::json packages = nlohmann::json::array();
    if (oshi) packages = {"openvswitch", "quagga"};
    else if (n.kind == topo::NodeKind::CustomerEdge) packages = {"quagga", "iperf"};
    else packages = {"sdn-controller"};
    doc.setup.push_back({{"op", "install-packages"}, {"packages", packages}});

    auto& cfg = doc.config;
    cfg.push_back({{"op", "hostname"}, {"name", n.id}});
    cfg.push_back({{"op", "management"}, {"vm", plan.mapping.at(n.id)}, {"address", mgmt(n.id)}});
    if (oshi) cfg.push_back({{"op", "loopback"}, {"address", addr.loopback(n.id).str() + "/32"}});
    nlohmann::json networks = nlohmann::json::array();
    std::string gateway;
    for (const auto& port : addr.ports(n.id)) {
      const auto* link = model.linkAt(n.id, port);
      const auto& peer = link->peerOf(n.id);
      const auto* t = tunnelOf.count(link->id) ? tunnelOf.at(link->id) : nullptr;
      if (t)
        cfg.push_back({{"op", "tunnel"},
                       {"port", port},
                       {"kind", toString(t->kind)},
                       {"vni", t->vni},
                       {"local", mgmt(n.id)},
                       {"remote", mgmt(peer.node)}});
      auto prefix = addr.linkPrefix(link->id);
      cfg.push_back({{"op", "interface"},
                     {"port", port},
                     {"address", addr.interfaceAddress(n.id, port).str() + "/30"},
                     {"mac", addr.interfaceMac(n.id, port).str()}});
      networks.push_back(prefix.str());
      if (!oshi) gateway = addr.interfaceAddress(peer.node, peer.port).str();
    }
    if (oshi) {
      netsim::OshiNodeState st;
      st.nodeId = n.id;
      st.physicalPorts = addr.ports(n.id);
      st.pairAllPorts();
      for (const auto& [phys, internal] : st.portPairs)
        cfg.push_back({{"op", "internal-port"}, {"port", phys}, {"internal", internal}});
      nlohmann::json rules = nlohmann::json::array();
      for (const auto& r : netsim::bootstrapTables(st, n.kind, true)) rules.push_back(netsim::toJson(r));
      cfg.push_back({{"op", "ofcs-bootstrap"}, {"rules", rules}});
      auto ctl = model.controllerAssignment.find(n.id);
      if (ctl != model.controllerAssignment.end()) {
        std::string ctlAddr;
        for (const auto& p : addr.ports(ctl->second)) ctlAddr = addr.interfaceAddress(ctl->second, p).str();
        cfg.push_back({{"op", "controller"}, {"id", ctl->second}, {"address", ctlAddr}, {"port", 6633}});
      }
      networks.push_back(addr.loopback(n.id).str() + "/32");
      cfg.push_back({{"op", "routing"}, {"protocol", "ospf"}, {"routerId", addr.loopback(n.id).str()}, {"networks", networks}});
    } else if (!gateway.empty()) {
      cfg.push_back({{"op", "default-route"}, {"via", gateway}});
    }
    out.emplace(n.id, std::move(doc));
  }
  return out;
}

DeploymentPlan buildPlan(const topo::TopologyModel& model, const ResourcePool& pool, const Mapping& overrides,
                         TunnelKind kind) {
  DeploymentPlan plan;
  plan.mapping = mapNodes(model, pool, overrides);
  plan.tunnels = planOverlay(model, plan.mapping, kind);
  plan.nodeConfigs = emitConfigs(model, plan, pool);
  for (const char* k : {"vxlan", "pw-gre", "eompls-reference", "userspace"}) plan.overheadBytesPerPacket[k] = overheadOf(k);
  return plan;
}

}  // namespace oshi::deploy
