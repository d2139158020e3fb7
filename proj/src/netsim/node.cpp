#include "oshi/netsim/node.hpp"

#include <algorithm>

#include "oshi/error.hpp"

namespace oshi::netsim {

std::string internalPort(const PortId& physical) { return "int-" + physical; }

void sortFib(Fib& fib) {
  std::sort(fib.begin(), fib.end(), [](const FibEntry& a, const FibEntry& b) {
    if (a.prefix.length != b.prefix.length) return a.prefix.length > b.prefix.length;
    return a.prefix.network < b.prefix.network;
  });
}

const FibEntry* longestMatch(const Fib& fib, Ipv4Addr dst) {
  for (const auto& e : fib)
    if (e.prefix.contains(dst)) return &e;
  return nullptr;
}

void OshiNodeState::pairAllPorts() {
  for (const auto& p : physicalPorts) portPairs[p] = internalPort(p);
}

RuleId OshiNodeState::installRule(int tableId, int priority, Match match, std::vector<Action> actions,
                                  std::string owner) {
  FlowRule r;
  r.id = nextRuleId;
  r.priority = priority;
  r.match = std::move(match);
  r.actions = std::move(actions);
  r.owner = std::move(owner);
  table(tableId).install(std::move(r));
  return nextRuleId++;
}

bool OshiNodeState::removeRule(RuleId id) { return table0.remove(id) || table1.remove(id); }

bool OshiNodeState::ownsAddress(Ipv4Addr a) const {
  if (a == loopback) return true;
  return std::any_of(interfaces.begin(), interfaces.end(), [&](const auto& kv) { return kv.second.address == a; });
}

std::optional<PortId> OshiNodeState::subinterfaceFor(const PortId& port, std::uint16_t vlan) const {
  auto name = port + "." + std::to_string(vlan);
  if (subinterfaces.count(name)) return name;
  return std::nullopt;
}

std::vector<FlowRule> bootstrapTables(OshiNodeState& node, topo::NodeKind, bool vllMulticastRule) {
  for (const auto& p : node.physicalPorts)
    if (!node.portPairs.count(p))
      throw Error(ErrorCode::MissingPortPairs, "port " + p + " of " + node.nodeId + " has no internal port",
                  node.nodeId);
  std::vector<RuleId> ids;
  auto add = [&](int prio, Match m, std::vector<Action> a) {
    ids.push_back(node.installRule(0, prio, std::move(m), std::move(a), kBootstrapOwner));
  };
  add(kPrioMpls, Match{.ethertype = kEthMpls}, {action::GotoTable{1}});
  if (vllMulticastRule) add(kPrioMpls, Match{.ethertype = kEthMplsMulticast}, {action::GotoTable{1}});
  add(kPrioDiscovery, Match{.ethertype = kEthLldp}, {action::ToController{}});
  add(kPrioDiscovery, Match{.ethertype = kEthBddp}, {action::ToController{}});
  for (const auto& [phys, internal] : node.portPairs) {
    add(kPrioBridge, Match{.inPort = phys}, {action::Output{internal}});
    add(kPrioBridge, Match{.inPort = internal}, {action::Output{phys}});
  }
  std::vector<FlowRule> out;
  for (auto id : ids) out.push_back(*node.table0.find(id));
  return out;
}

namespace {

Destination classify(const OshiNodeState& node, const PortId& port, PortId& resolved) {
  resolved = port;
  if (port.rfind("int-", 0) == 0) {
    resolved = port.substr(4);
    return Destination::IpEngine;
  }
  if (port.rfind("ace:", 0) == 0 || port.rfind("acevtep:", 0) == 0) return Destination::Ace;
  if (port.rfind("vbp:", 0) == 0) return Destination::Vbp;
  (void)node;
  return Destination::Port;
}

}  // namespace

OfcsResult ofcsProcess(OshiNodeState& node, const PortId& inPort, const Frame& input, const CostModel& cost) {
  OfcsResult result;
  result.cost = cost.cOfcsLookup;
  Frame frame = input;
  auto drop = [&](DropReason r) {
    OfcsOutput o;
    o.destination = Destination::Drop;
    o.port = inPort;
    o.frame = frame;
    o.reason = r;
    result.outputs.push_back(std::move(o));
  };

  FlowRule* rule = node.table0.lookup(inPort, frame);
  if (!rule) {
    drop(DropReason::NoRule);
    return result;
  }
  for (int depth = 0; depth < 2; ++depth) {
    ++rule->counters.packets;
    rule->counters.bytes += frame.wireSize();
    bool jumped = false;
    for (const auto& act : rule->actions) {
      if (isMplsAction(act)) {
        ++result.mplsOps;
        result.cost += cost.cMplsOp;
      }
      if (const auto* o = std::get_if<action::Output>(&act)) {
        OfcsOutput out;
        out.destination = classify(node, o->port, out.port);
        out.frame = frame;
        result.outputs.push_back(std::move(out));
      } else if (std::get_if<action::GotoTable>(&act)) {
        jumped = true;
        break;
      } else if (std::get_if<action::ToController>(&act)) {
        OfcsOutput out;
        out.destination = Destination::Controller;
        out.port = inPort;
        out.frame = frame;
        result.outputs.push_back(std::move(out));
      } else if (const auto* p = std::get_if<action::PushMpls>(&act)) {
        frame.mplsStack.insert(frame.mplsStack.begin(), MplsEntry{p->label, 0, frame.mplsStack.empty(), 255});
        frame.ethertype = p->ethertype;
      } else if (const auto* p = std::get_if<action::PopMpls>(&act)) {
        if (frame.mplsStack.empty()) {
          drop(DropReason::RuleDrop);
          return result;
        }
        frame.mplsStack.erase(frame.mplsStack.begin());
        if (frame.mplsStack.empty()) frame.ethertype = p->ethertype;
      } else if (const auto* s = std::get_if<action::SetMplsLabel>(&act)) {
        if (frame.mplsStack.empty()) {
          drop(DropReason::RuleDrop);
          return result;
        }
        auto& top = frame.mplsStack.front();
        if (top.ttl <= 1) {
          drop(DropReason::MplsTtlExpired);
          return result;
        }
        --top.ttl;
        top.label = s->label;
      } else if (const auto* m = std::get_if<action::SetEthSrc>(&act)) {
        frame.ethSrc = m->mac;
      } else if (const auto* m = std::get_if<action::SetEthDst>(&act)) {
        frame.ethDst = m->mac;
      } else if (std::get_if<action::ToIpEngine>(&act)) {
        OfcsOutput out;
        out.destination = Destination::IpEngine;
        out.port = inPort;
        out.frame = frame;
        result.outputs.push_back(std::move(out));
      } else if (const auto* a = std::get_if<action::ToAce>(&act)) {
        OfcsOutput out;
        out.destination = Destination::Ace;
        out.port = aceLocalPort(a->customerId, inPort);
        out.frame = frame;
        result.outputs.push_back(std::move(out));
      }
    }
    if (!jumped) break;
    // Table 1 only ever sees MPLS frames.
    if (!isMplsEthertype(frame.ethertype) || !(rule = node.table1.lookup(inPort, frame))) {
      drop(DropReason::NoSbpMatch);
      return result;
    }
  }
  if (result.outputs.empty()) drop(DropReason::RuleDrop);
  return result;
}

IpResult ipForward(const OshiNodeState& node, const Frame& input, const CostModel& cost) {
  IpResult r;
  r.cost = cost.cIpForward;
  r.frame = input;
  if (!input.ip || input.ethertype != kEthIpv4 || !input.mplsStack.empty() || !input.vlanTags.empty()) {
    r.reason = DropReason::NotIp;
    return r;
  }
  if (node.ownsAddress(input.ip->dst)) {
    r.kind = IpResult::Kind::Local;
    return r;
  }
  if (input.ip->ttl <= 1) {
    r.reason = DropReason::TtlExpired;
    return r;
  }
  const FibEntry* e = longestMatch(node.fib, input.ip->dst);
  if (!e) {
    r.reason = DropReason::NoRoute;
    return r;
  }
  auto iface = node.interfaces.find(e->outPort);
  r.kind = IpResult::Kind::Forward;
  r.outPort = e->outPort;
  r.frame.ip->ttl = static_cast<std::uint8_t>(input.ip->ttl - 1);
  if (iface != node.interfaces.end()) r.frame.ethSrc = iface->second.mac;
  r.frame.ethDst = e->nextHopMac;
  return r;
}

std::uint64_t flowKey(const PortId& inPort, const Frame& f) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(std::hash<std::string>{}(inPort));
  mix(f.ethSrc.value);
  mix(f.ethDst.value);
  mix(f.ethertype);
  for (auto v : f.vlanTags) mix(v);
  if (!f.mplsStack.empty()) mix(f.mplsStack.front().label);
  if (f.ip) {
    mix(f.ip->src.value);
    mix(f.ip->dst.value);
    mix(f.ip->proto);
  }
  if (f.udp) mix((std::uint64_t{f.udp->srcPort} << 16) | f.udp->dstPort);
  return h;
}

double flowCacheCharge(OshiNodeState& node, FlowCacheMode mode, std::uint64_t key, double pipelineCost,
                       const CostModel& cost) {
  switch (mode) {
    case FlowCacheMode::None:
      return pipelineCost;
    case FlowCacheMode::UserspaceOnly:
      return cost.cUserspaceMiss;
    case FlowCacheMode::Kernel: {
      auto [it, inserted] = node.flowCache.try_emplace(key, 0);
      if (inserted) return cost.cUserspaceMiss;
      ++it->second;
      return pipelineCost;
    }
  }
  return pipelineCost;
}

nlohmann::json toJson(const OshiNodeState& node, bool withCounters) {
  using nlohmann::json;
  json t0 = json::array(), t1 = json::array();
  for (const auto& r : node.table0.rules()) t0.push_back(toJson(r, withCounters));
  for (const auto& r : node.table1.rules()) t1.push_back(toJson(r, withCounters));
  json fib = json::array();
  for (const auto& e : node.fib)
    fib.push_back({{"prefix", e.prefix.str()},
                   {"nextHop", e.nextHopNode},
                   {"outPort", e.outPort},
                   {"nextHopMac", e.nextHopMac.str()},
                   {"connected", e.connected}});
  json aces = json::object();
  for (const auto& [c, ace] : node.aces) {
    json bindings = json::object();
    for (const auto& [p, b] : ace.pwBindings)
      bindings[p] = {{"remoteVtep", b.remoteVtep.str()}, {"service", b.sessionId}};
    aces[c] = {{"vtep", ace.grePort.vtepIp.str()}, {"localPorts", ace.localPorts}, {"pwBindings", bindings}};
  }
  json vbps = json::object();
  for (const auto& [v, vbp] : node.vbps) {
    json macs = json::object();
    for (const auto& [m, p] : vbp.macTable) macs[m.str()] = p;
    vbps[v] = {{"vtep", vbp.grePort.vtepIp.str()}, {"remotePorts", vbp.remotePorts}, {"macTable", macs}};
  }
  json j{{"node", node.nodeId},
         {"role", topo::toString(node.role)},
         {"loopback", node.loopback.str()},
         {"table0", t0},
         {"table1", t1},
         {"fib", fib},
         {"aces", aces},
         {"vbps", vbps}};
  if (withCounters) {
    j["counters"] = {{"pkts", node.counters.pkts},
                     {"bytes", node.counters.bytes},
                     {"cost", node.counters.cost},
                     {"dropped", node.counters.dropped},
                     {"drops", node.counters.drops}};
  }
  return j;
}

}  // namespace oshi::netsim
