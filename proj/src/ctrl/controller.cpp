#include "oshi/ctrl/controller.hpp"

#include <algorithm>
#include <deque>

#include "oshi/error.hpp"

namespace oshi::ctrl {

using namespace netsim;
namespace act = netsim::action;

namespace {

std::string_view toString(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

nlohmann::json pathJson(const SbpPath& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& h : path) j.push_back({{"node", h.node}, {"inPort", h.inPort}, {"outPort", h.outPort}});
  return j;
}

void checkOctet(int v, const char* what) {
  if (v < 1 || v > 255) throw Error(ErrorCode::InvalidArgument, std::string(what) + " index out of VTEP address range");
}

}  // namespace

Ipv4Addr aceVtepIp(int c, int n) {
  checkOctet(c, "customer");
  checkOctet(n, "node");
  return Ipv4Addr::fromOctets(10, 254, static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(n));
}

Ipv4Addr vbpVtepIp(int c, int n) {
  checkOctet(c, "customer");
  checkOctet(n, "node");
  return Ipv4Addr::fromOctets(10, 253, static_cast<std::uint8_t>(c), static_cast<std::uint8_t>(n));
}

MacAddr aceVtepMac(int c, int n) {
  return MacAddr{0x0afe00000000ULL | (std::uint64_t(c & 0xffff) << 16) | std::uint64_t(n & 0xffff)};
}

MacAddr vbpVtepMac(int c, int n) {
  return MacAddr{0x0afd00000000ULL | (std::uint64_t(c & 0xffff) << 16) | std::uint64_t(n & 0xffff)};
}

nlohmann::json SbpRecord::toJson() const {
  return {{"sbpId", sbpId},        {"service", serviceId},
          {"direction", toString(direction)}, {"path", pathJson(path)},
          {"labels", labels},      {"rules", installedRules.size()}};
}

nlohmann::json VssInstance::toJson() const {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : tree.edges) edges.push_back({e.u, e.v});
  return {{"vssId", vssId},
          {"mode", toString(mode)},
          {"branchingPoints", branchingPoints},
          {"tree", {{"vertices", tree.vertices}, {"edges", edges}, {"cost", tree.cost}}},
          {"pws", pws}};
}

nlohmann::json ServiceRecord::toJson() const {
  nlohmann::json sb = nlohmann::json::array();
  for (const auto& s : sbps) sb.push_back(s.toJson());
  nlohmann::json pw = nlohmann::json::array();
  for (const auto& p : pws)
    pw.push_back({{"pwId", p.pwId},
                  {"a", {{"node", p.a.node}, {"vtep", p.a.ip.str()}, {"port", p.a.ofcsPort}}},
                  {"b", {{"node", p.b.node}, {"vtep", p.b.ip.str()}, {"port", p.b.ofcsPort}}}});
  nlohmann::json j{{"id", spec.id}, {"kind", topo::toString(spec.kind)}, {"sbps", sb}, {"accessRules", accessRules.size()}};
  if (spec.kind != topo::ServiceKind::IpVll) {
    j["customer"] = spec.customer();
    j["pws"] = pw;
  }
  if (vss) j["vss"] = vss->toJson();
  return j;
}

Controller::Controller(Network& net) : net_(net) {
  std::set<std::string> customers;
  for (const auto& s : net_.model().services)
    if (s.kind != topo::ServiceKind::IpVll) customers.insert(s.customer());
  for (const auto& c : customers) customers_.emplace(c, static_cast<int>(customers_.size()) + 1);
  rediscover();
}

void Controller::rediscover() { graph_ = discover(net_); }

int Controller::customerIndex(const std::string& customer) const {
  auto it = customers_.find(customer);
  if (it == customers_.end()) throw Error(ErrorCode::InvalidArgument, "unknown customer " + customer, customer);
  return it->second;
}

ServiceRecord& Controller::begin(const topo::ServiceSpec& spec, topo::ServiceKind kind, std::size_t minEp,
                                 std::size_t maxEp) {
  if (spec.kind != kind) throw Error(ErrorCode::InvalidArgument, "service kind mismatch", spec.id);
  if (spec.id.empty()) throw Error(ErrorCode::InvalidArgument, "service id is empty");
  if (services_.count(spec.id)) throw Error(ErrorCode::InvalidArgument, "service already provisioned", spec.id);
  if (spec.endpoints.size() < minEp || spec.endpoints.size() > maxEp)
    throw Error(ErrorCode::InvalidArgument, "wrong number of endpoints", spec.id);
  for (const auto& ep : spec.endpoints) {
    const auto* link = net_.linkAt(ep.pe, ep.port);
    const auto* node = net_.model().findNode(ep.pe);
    if (!node || node->kind != topo::NodeKind::ProviderEdge || !link || link->kind != topo::LinkKind::Access)
      throw Error(ErrorCode::InvalidArgument, "endpoint " + ep.pe + ":" + ep.port + " is not a PE access port", spec.id);
    if (ep.vlan && (*ep.vlan < 1 || *ep.vlan > 4094))
      throw Error(ErrorCode::InvalidArgument, "VLAN out of range", spec.id);
  }
  if (kind != topo::ServiceKind::IpVll && !customers_.count(spec.customer()))
    customers_.emplace(spec.customer(), static_cast<int>(customers_.size()) + 1);
  auto& rec = services_[spec.id];
  rec.spec = spec;
  return rec;
}

void Controller::claim(ServiceRecord& rec, const topo::AccessEndpoint& ep) {
  std::pair<std::string, std::string> key{ep.pe, ep.ofcsPort()};
  if (auto it = claims_.find(key); it != claims_.end())
    throw Error(ErrorCode::EndpointConflict, ep.pe + ":" + key.second + " is already used by " + it->second,
                rec.spec.id);
  claims_[key] = rec.spec.id;
  rec.claims.push_back(key);
  if (ep.vlan) {
    net_.addSubinterface(ep.pe, ep.port, static_cast<std::uint16_t>(*ep.vlan));
    rec.subinterfaces.emplace_back(ep.pe, ep.port, static_cast<std::uint16_t>(*ep.vlan));
  }
}

RuleId Controller::install(std::vector<std::pair<std::string, RuleId>>& sink, const std::string& node, int table,
                           int priority, Match match, std::vector<Action> actions, const std::string& owner) {
  RuleId id = net_.oshi(node).installRule(table, priority, std::move(match), std::move(actions), owner);
  sink.emplace_back(node, id);
  return id;
}

std::uint32_t Controller::allocate(SbpRecord& sbp, const std::string& linkId, const std::string& receiver) {
  auto label = labels_.allocate(linkId + "/" + receiver);
  sbp.labels[linkId] = label;
  return label;
}

std::vector<std::uint32_t> Controller::labelPath(SbpRecord& sbp, const std::string& from, const std::string& to) {
  sbp.path = computeSbpPath(graph_, from, to);
  std::vector<std::uint32_t> labels;
  for (std::size_t i = 1; i < sbp.path.size(); ++i) {
    const auto* link = net_.linkAt(sbp.path[i].node, sbp.path[i].inPort);
    labels.push_back(allocate(sbp, link->id, sbp.path[i].node));
  }
  return labels;
}

void Controller::releaseSbp(const SbpRecord& sbp) {
  for (const auto& [node, id] : sbp.installedRules) net_.oshi(node).removeRule(id);
  for (std::size_t i = 1; i < sbp.path.size(); ++i) {
    const auto* link = net_.linkAt(sbp.path[i].node, sbp.path[i].inPort);
    if (!link) continue;
    auto it = sbp.labels.find(link->id);
    if (it != sbp.labels.end()) labels_.release(link->id + "/" + sbp.path[i].node, it->second);
  }
}

std::pair<SbpRecord, SbpRecord> Controller::provisionVll(const topo::ServiceSpec& spec) {
  auto& rec = begin(spec, topo::ServiceKind::IpVll, 2, 2);
  try {
    for (const auto& ep : spec.endpoints) claim(rec, ep);
    auto build = [&](Direction dir, const topo::AccessEndpoint& from, const topo::AccessEndpoint& to) {
      SbpRecord sbp;
      sbp.sbpId = spec.id + (dir == Direction::Forward ? "/fwd" : "/rev");
      sbp.serviceId = spec.id;
      sbp.direction = dir;
      const auto in = from.ofcsPort(), out = to.ofcsPort();
      try {
        if (from.pe == to.pe) {
          sbp.path = {{from.pe, in, out}};
          install(sbp.installedRules, from.pe, 0, kPrioService, Match{.inPort = in}, {act::Output{out}}, spec.id);
          return sbp;
        }
        auto labels = labelPath(sbp, from.pe, to.pe);
        auto& path = sbp.path;
        path.front().inPort = in;
        path.back().outPort = out;
        const auto& first = path.front();
        install(sbp.installedRules, first.node, 0, kPrioService, Match{.inPort = in, .ethertype = kEthIpv4},
                {act::PushMpls{labels[0], kEthMpls}, act::Output{first.outPort}}, spec.id);
        install(sbp.installedRules, first.node, 0, kPrioService, Match{.inPort = in, .ethertype = kEthArp},
                {act::PushMpls{labels[0], kEthMplsMulticast}, act::Output{first.outPort}}, spec.id);
        for (std::size_t i = 1; i + 1 < path.size(); ++i)
          install(sbp.installedRules, path[i].node, 1, kPrioSbp, Match{.inPort = path[i].inPort, .mplsLabel = labels[i - 1]},
                  {act::SetMplsLabel{labels[i]}, act::Output{path[i].outPort}}, spec.id);
        const auto& last = path.back();
        const auto lastLabel = labels.back();
        install(sbp.installedRules, last.node, 1, kPrioSbp,
                Match{.inPort = last.inPort, .ethertype = kEthMpls, .mplsLabel = lastLabel},
                {act::PopMpls{kEthIpv4}, act::Output{out}}, spec.id);
        install(sbp.installedRules, last.node, 1, kPrioSbp,
                Match{.inPort = last.inPort, .ethertype = kEthMplsMulticast, .mplsLabel = lastLabel},
                {act::PopMpls{kEthArp}, act::Output{out}}, spec.id);
      } catch (...) {
        releaseSbp(sbp);
        throw;
      }
      return sbp;
    };
    rec.sbps.push_back(build(Direction::Forward, spec.endpoints[0], spec.endpoints[1]));
    rec.sbps.push_back(build(Direction::Reverse, spec.endpoints[1], spec.endpoints[0]));
  } catch (...) {
    rollback(spec.id);
    throw;
  }
  net_.markProvisioned(spec.id, true);
  return {rec.sbps[0], rec.sbps[1]};
}

VtepRef Controller::bindAce(ServiceRecord& rec, const topo::AccessEndpoint& ep, const std::string& customer) {
  auto& node = net_.oshi(ep.pe);
  const int ci = customerIndex(customer);
  const int ni = net_.addressing().nodeIndex(ep.pe);
  auto& ace = node.aces[customer];
  if (ace.customerId.empty()) {
    ace.customerId = customer;
    ace.grePort.vtepIp = aceVtepIp(ci, ni);
    ace.grePort.mac = aceVtepMac(ci, ni);
  }
  const auto local = ep.ofcsPort();
  if (std::find(ace.localPorts.begin(), ace.localPorts.end(), local) != ace.localPorts.end())
    throw Error(ErrorCode::EndpointConflict, "ACE port " + local + " already bound", rec.spec.id);
  ace.localPorts.push_back(local);
  rec.aceBindings.emplace_back(ep.pe, customer, local);
  const auto acePort = aceLocalPort(customer, local);
  install(rec.accessRules, ep.pe, 0, kPrioService, Match{.inPort = local}, {act::Output{acePort}}, rec.spec.id);
  install(rec.accessRules, ep.pe, 0, kPrioService, Match{.inPort = acePort}, {act::Output{local}}, rec.spec.id);
  return {ep.pe, aceVtepPort(customer), ace.grePort.vtepIp, ace.grePort.mac};
}

VtepRef Controller::ensureVbp(ServiceRecord& rec, const std::string& node, const std::string& vssId,
                              const std::string& customer) {
  const int ci = customerIndex(customer);
  const int ni = net_.addressing().nodeIndex(node);
  auto& vbps = net_.oshi(node).vbps;
  if (vbps.count(vssId)) throw Error(ErrorCode::EndpointConflict, "VBP already present", vssId);
  auto& vbp = vbps[vssId];
  vbp.vssId = vssId;
  vbp.customerId = customer;
  vbp.grePort.vtepIp = vbpVtepIp(ci, ni);
  vbp.grePort.mac = vbpVtepMac(ci, ni);
  rec.vbps.emplace_back(node, vssId);
  return {node, vbpPort(vssId), vbp.grePort.vtepIp, vbp.grePort.mac};
}

void Controller::attachRemote(const VtepRef& local, const VtepRef& remote, const std::string& customer,
                              const std::string& serviceId, const PortId& localPort) {
  auto& node = net_.oshi(local.node);
  if (local.ofcsPort.rfind("acevtep:", 0) == 0) {
    auto& ace = node.aces.at(customer);
    for (const auto& [p, b] : ace.pwBindings)
      if (b.remoteVtep == remote.ip)
        throw Error(ErrorCode::EndpointConflict,
                    "a pseudowire between " + local.ip.str() + " and " + remote.ip.str() + " already exists", serviceId);
    ace.pwBindings[localPort] = {remote.ip, serviceId};
    ace.grePort.staticArp[remote.ip] = remote.mac;
  } else {
    auto& vbp = node.vbps.at(local.ofcsPort.substr(4));
    const auto name = remote.ip.str();
    if (std::find(vbp.remotePorts.begin(), vbp.remotePorts.end(), name) != vbp.remotePorts.end())
      throw Error(ErrorCode::EndpointConflict, "VBP already reaches " + name, serviceId);
    vbp.remotePorts.push_back(name);
    vbp.grePort.staticArp[remote.ip] = remote.mac;
  }
}

SbpRecord Controller::tunnel(ServiceRecord& rec, const std::string& sbpId, Direction dir, const VtepRef& src,
                             const VtepRef& dst) {
  SbpRecord sbp;
  sbp.sbpId = sbpId;
  sbp.serviceId = rec.spec.id;
  sbp.direction = dir;
  const auto& owner = rec.spec.id;
  const auto& addr = net_.addressing();
  try {
    if (src.node == dst.node) {
      sbp.path = {{src.node, src.ofcsPort, dst.ofcsPort}};
      install(sbp.installedRules, src.node, 0, kPrioService, Match{.inPort = src.ofcsPort, .ethDst = dst.mac},
              {act::Output{dst.ofcsPort}}, owner);
      return sbp;
    }
    auto labels = labelPath(sbp, src.node, dst.node);
    auto& path = sbp.path;
    path.front().inPort = src.ofcsPort;
    path.back().outPort = dst.ofcsPort;
    auto hopMacs = [&](std::size_t i) {
      return std::pair{addr.interfaceMac(path[i].node, path[i].outPort),
                       addr.interfaceMac(path[i + 1].node, path[i + 1].inPort)};
    };
    auto [s0, d0] = hopMacs(0);
    install(sbp.installedRules, src.node, 0, kPrioService,
            Match{.inPort = src.ofcsPort, .ethertype = kEthIpv4, .ethDst = dst.mac},
            {act::PushMpls{labels[0], kEthMpls}, act::SetEthSrc{s0}, act::SetEthDst{d0}, act::Output{path[0].outPort}},
            owner);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
      auto [s, d] = hopMacs(i);
      install(sbp.installedRules, path[i].node, 1, kPrioSbp, Match{.inPort = path[i].inPort, .mplsLabel = labels[i - 1]},
              {act::SetMplsLabel{labels[i]}, act::SetEthSrc{s}, act::SetEthDst{d}, act::Output{path[i].outPort}}, owner);
    }
    install(sbp.installedRules, dst.node, 1, kPrioSbp,
            Match{.inPort = path.back().inPort, .ethertype = kEthMpls, .mplsLabel = labels.back()},
            {act::PopMpls{kEthIpv4}, act::SetEthSrc{src.mac}, act::SetEthDst{dst.mac}, act::Output{dst.ofcsPort}}, owner);
  } catch (...) {
    releaseSbp(sbp);
    throw;
  }
  return sbp;
}

PwRecord Controller::connectPw(ServiceRecord& rec, const std::string& pwId, const VtepRef& a, const VtepRef& b) {
  PwRecord pw{pwId, a, b, {}, {}};
  pw.forward = tunnel(rec, pwId + "/fwd", Direction::Forward, a, b);
  rec.sbps.push_back(pw.forward);
  pw.reverse = tunnel(rec, pwId + "/rev", Direction::Reverse, b, a);
  rec.sbps.push_back(pw.reverse);
  rec.pws.push_back(pw);
  return pw;
}

PwRecord Controller::provisionPw(const topo::ServiceSpec& spec) {
  auto& rec = begin(spec, topo::ServiceKind::Pw, 2, 2);
  PwRecord result;
  try {
    const auto& a = spec.endpoints[0];
    const auto& b = spec.endpoints[1];
    for (const auto& ep : spec.endpoints) claim(rec, ep);
    if (a.pe == b.pe) {
      install(rec.accessRules, a.pe, 0, kPrioService, Match{.inPort = a.ofcsPort()}, {act::Output{b.ofcsPort()}}, spec.id);
      install(rec.accessRules, a.pe, 0, kPrioService, Match{.inPort = b.ofcsPort()}, {act::Output{a.ofcsPort()}}, spec.id);
      result.pwId = spec.id + "/pw1";
      result.a = {a.pe, a.ofcsPort(), {}, {}};
      result.b = {b.pe, b.ofcsPort(), {}, {}};
      rec.pws.push_back(result);
    } else {
      const auto customer = spec.customer();
      auto va = bindAce(rec, a, customer);
      auto vb = bindAce(rec, b, customer);
      attachRemote(va, vb, customer, spec.id, a.ofcsPort());
      attachRemote(vb, va, customer, spec.id, b.ofcsPort());
      result = connectPw(rec, spec.id + "/pw1", va, vb);
    }
  } catch (...) {
    rollback(spec.id);
    throw;
  }
  net_.markProvisioned(spec.id, true);
  return result;
}

VssInstance Controller::provisionVss(const topo::ServiceSpec& spec, VssMode mode, std::uint64_t seed) {
  auto& rec = begin(spec, topo::ServiceKind::Vss, 2, SIZE_MAX);
  VssInstance inst;
  try {
    const auto customer = spec.customer();
    for (const auto& ep : spec.endpoints) claim(rec, ep);
    std::vector<std::string> pes;
    for (const auto& ep : spec.endpoints) pes.push_back(ep.pe);
    auto sel = selectBranchingPoints(graph_, pes, mode, seed);
    inst.vssId = spec.id;
    inst.mode = mode;
    inst.branchingPoints = sel.branchingPoints;
    inst.tree = sel.tree;

    std::map<std::string, std::vector<std::string>> treeAdj;
    for (const auto& e : sel.tree.edges) {
      treeAdj[e.u].push_back(e.v);
      treeAdj[e.v].push_back(e.u);
    }
    for (auto& [v, list] : treeAdj) std::sort(list.begin(), list.end());
    std::map<std::string, VtepRef> vbpRefs;
    for (const auto& b : sel.branchingPoints) vbpRefs[b] = ensureVbp(rec, b, spec.id, customer);

    auto nearestVbp = [&](const std::string& from) {
      std::deque<std::string> q{from};
      std::set<std::string> seen{from};
      while (!q.empty()) {
        auto u = q.front();
        q.pop_front();
        if (sel.branchingPoints.count(u)) return u;
        for (const auto& n : treeAdj[u])
          if (seen.insert(n).second) q.push_back(n);
      }
      throw Error(ErrorCode::DisconnectedTerminals, from + " is not attached to a branching point", spec.id);
    };

    int n = 0;
    for (const auto& ep : spec.endpoints) {
      const auto& vbp = vbpRefs.at(nearestVbp(ep.pe));
      auto va = bindAce(rec, ep, customer);
      attachRemote(va, vbp, customer, spec.id, ep.ofcsPort());
      attachRemote(vbp, va, customer, spec.id, "");
      inst.pws.push_back(connectPw(rec, spec.id + "/pw" + std::to_string(++n), va, vbp).pwId);
    }
    // VBP-VBP pseudowires along the tree contracted to its branching points.
    std::set<std::pair<std::string, std::string>> pairs;
    for (const auto& b : sel.branchingPoints) {
      for (const auto& first : treeAdj[b]) {
        std::string prev = b, cur = first;
        while (!sel.branchingPoints.count(cur) && treeAdj[cur].size() == 2) {
          const auto& adj = treeAdj[cur];
          std::string next = adj[0] == prev ? adj[1] : adj[0];
          prev = cur;
          cur = next;
        }
        if (sel.branchingPoints.count(cur) && b < cur) pairs.emplace(b, cur);
      }
    }
    for (const auto& [x, y] : pairs) {
      const auto& vx = vbpRefs.at(x);
      const auto& vy = vbpRefs.at(y);
      attachRemote(vx, vy, customer, spec.id, "");
      attachRemote(vy, vx, customer, spec.id, "");
      inst.pws.push_back(connectPw(rec, spec.id + "/pw" + std::to_string(++n), vx, vy).pwId);
    }
    rec.vss = inst;
  } catch (...) {
    rollback(spec.id);
    throw;
  }
  net_.markProvisioned(spec.id, true);
  return inst;
}

const ServiceRecord& Controller::provision(const topo::ServiceSpec& spec) {
  switch (spec.kind) {
    case topo::ServiceKind::IpVll:
      provisionVll(spec);
      break;
    case topo::ServiceKind::Pw:
      provisionPw(spec);
      break;
    case topo::ServiceKind::Vss: {
      auto mode = VssMode::Optimized;
      std::uint64_t seed = 0;
      if (auto it = spec.options.find("vssMode"); it != spec.options.end()) mode = parseVssMode(it->second);
      if (auto it = spec.options.find("seed"); it != spec.options.end()) {
        try {
          seed = std::stoull(it->second);
        } catch (const std::exception&) {
          throw Error(ErrorCode::InvalidArgument, "seed option must be an unsigned integer", spec.id);
        }
      }
      provisionVss(spec, mode, seed);
      break;
    }
  }
  return services_.at(spec.id);
}

void Controller::rollback(const std::string& serviceId) {
  auto it = services_.find(serviceId);
  if (it == services_.end()) return;
  auto& rec = it->second;
  for (const auto& sbp : rec.sbps) releaseSbp(sbp);
  for (const auto& [node, id] : rec.accessRules) net_.oshi(node).removeRule(id);
  for (const auto& [node, customer, local] : rec.aceBindings) {
    auto& aces = net_.oshi(node).aces;
    auto ace = aces.find(customer);
    if (ace == aces.end()) continue;
    auto& st = ace->second;
    if (auto b = st.pwBindings.find(local); b != st.pwBindings.end()) {
      st.grePort.staticArp.erase(b->second.remoteVtep);
      st.pwBindings.erase(b);
    }
    st.localPorts.erase(std::remove(st.localPorts.begin(), st.localPorts.end(), local), st.localPorts.end());
    if (st.localPorts.empty() && st.pwBindings.empty()) aces.erase(ace);
  }
  for (const auto& [node, vss] : rec.vbps) net_.oshi(node).vbps.erase(vss);
  for (const auto& [node, port, vlan] : rec.subinterfaces) net_.removeSubinterface(node, port, vlan);
  for (const auto& key : rec.claims) claims_.erase(key);
  net_.markProvisioned(serviceId, false);
  services_.erase(it);
}

void Controller::teardown(const std::string& serviceId) {
  if (!services_.count(serviceId))
    throw Error(ErrorCode::UnknownService, "service " + serviceId + " is not provisioned", serviceId);
  rollback(serviceId);
}

nlohmann::json Controller::audit() const {
  nlohmann::json svc = nlohmann::json::array();
  for (const auto& [id, rec] : services_) svc.push_back(rec.toJson());
  nlohmann::json labels = nlohmann::json::object();
  for (const auto& [link, st] : labels_.perLink()) labels[link] = labels_.inUseCount(link);
  return {{"services", svc}, {"labelsInUse", labels}, {"discovered", graph_.toJson()}};
}

}  // namespace oshi::ctrl
