#include "support/property_checks.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <fmt/format.h>

#include "oshi/ctrl/control.hpp"
#include "oshi/ctrl/session.hpp"
#include "oshi/deploy/plan.hpp"
#include "oshi/error.hpp"
#include "oshi/netsim/fib.hpp"
#include "oshi/topo/generate.hpp"
#include "oshi/util/rng.hpp"

namespace testing {

using namespace oshi;
using netsim::Frame;
using netsim::MacAddr;

void Report::expect(bool cond, const std::string& what) {
  ++checks;
  if (!cond) failures.push_back(what);
}

void Report::merge(const Report& other, const std::string& prefix) {
  checks += other.checks;
  for (const auto& f : other.failures) failures.push_back(prefix + f);
}

topo::TopologyModel propertyTopology(std::uint64_t seed) {
  util::DetRng rng(util::mixSeed(0x5eed, seed));
  const int core = 3 + static_cast<int>(rng.below(10));
  const int pe = 5 + static_cast<int>(rng.below(6));
  const int cePerPe = 2 + static_cast<int>(rng.below(2));
  const double extra = 0.05 + 0.25 * rng.uniform01();
  return topo::generateRandom(core, pe, cePerPe, extra, seed);
}

namespace {

struct Attachment {
  std::string ce;
  topo::AccessEndpoint ep;
};

std::vector<Attachment> attachments(const topo::TopologyModel& m) {
  std::vector<Attachment> out;
  for (const auto& n : m.nodes) {
    if (n.kind != topo::NodeKind::CustomerEdge) continue;
    for (const auto& l : m.links)
      if (l.touches(n.id)) {
        const auto& p = l.peerOf(n.id);
        out.push_back({n.id, {p.node, p.port, std::nullopt}});
        break;
      }
  }
  return out;
}

struct Selection {
  std::vector<Attachment> vll, pw, vss, free;
};

// Picks CEs on distinct PEs for each service; the rest carry best-effort traffic.
Selection select(const topo::TopologyModel& m, std::uint64_t seed) {
  auto all = attachments(m);
  util::DetRng rng(util::mixSeed(seed, 77));
  for (std::size_t i = all.size(); i > 1; --i) std::swap(all[i - 1], all[rng.below(i)]);
  std::vector<bool> used(all.size());
  auto take = [&](std::size_t count) {
    std::vector<Attachment> out;
    std::set<std::string> pes;
    for (std::size_t i = 0; i < all.size() && out.size() < count; ++i)
      if (!used[i] && !pes.count(all[i].ep.pe)) {
        used[i] = true;
        pes.insert(all[i].ep.pe);
        out.push_back(all[i]);
      }
    return out;
  };
  Selection s;
  s.vss = take(4);
  s.pw = take(2);
  s.vll = take(2);
  for (std::size_t i = 0; i < all.size(); ++i)
    if (!used[i]) s.free.push_back(all[i]);
  return s;
}

topo::ServiceSpec spec(const std::string& id, topo::ServiceKind kind, const std::vector<Attachment>& at) {
  topo::ServiceSpec s;
  s.id = id;
  s.kind = kind;
  for (const auto& a : at) s.endpoints.push_back(a.ep);
  return s;
}

std::map<std::string, std::uint64_t> ownerPackets(const netsim::Network& net) {
  std::map<std::string, std::uint64_t> out;
  for (const auto& id : net.oshiIds()) {
    const auto& n = net.oshi(id);
    for (const auto* t : {&n.table0, &n.table1})
      for (const auto& r : t->rules())
        if (r.counters.packets) out[r.owner] += r.counters.packets;
  }
  return out;
}

bool onlyOwners(const std::map<std::string, std::uint64_t>& counts, const std::set<std::string>& allowed) {
  return std::all_of(counts.begin(), counts.end(), [&](const auto& kv) { return allowed.count(kv.first) != 0; });
}

std::map<std::string, std::string> snapshot(const netsim::Network& net) {
  std::map<std::string, std::string> out;
  for (const auto& id : net.oshiIds()) out[id] = netsim::toJson(net.oshi(id), false).dump();
  return out;
}

// Delivered copies and frame bytes for every (free source, CE) pair.
std::vector<std::string> bestEffort(netsim::Network& net, const Selection& sel, const std::vector<Attachment>& dsts) {
  std::vector<std::string> out;
  for (const auto& s : sel.free)
    for (const auto& d : dsts) {
      if (s.ce == d.ce) continue;
      auto trace = net.sendFromHost(s.ce, net.hostUdpFrame(s.ce, d.ce, 300, false));
      std::string row = fmt::format("{}->{}:{}", s.ce, d.ce, trace.receivedBy(d.ce));
      for (const auto& r : trace.receptions) {
        auto bytes = r.frame.serialize();
        row += fmt::format(":{}@{}", r.host, std::string(bytes.begin(), bytes.end()).size());
        row += std::to_string(std::hash<std::string>{}(std::string(bytes.begin(), bytes.end())));
      }
      out.push_back(row);
    }
  return out;
}

Frame qinqFrame(const netsim::Network& net, const std::string& src, const std::string& dst, std::size_t size,
                std::uint64_t seed) {
  util::DetRng rng(seed);
  netsim::Bytes payload(size - 14 - 8);
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next());
  auto f = netsim::makeEthernetFrame(net.host(src).mac, net.host(dst).mac, 0x88b5, std::move(payload));
  f.vlanTags = {static_cast<std::uint16_t>(1 + rng.below(4094)), static_cast<std::uint16_t>(1 + rng.below(4094))};
  return f;
}

void checkPw(Report& r, netsim::Network& net, const Selection& sel, std::uint64_t seed) {
  const auto& addr = net.addressing();
  const auto& m = net.model();
  for (int dir = 0; dir < 2; ++dir) {
    const auto& src = sel.pw[dir].ce;
    const auto& dst = sel.pw[1 - dir].ce;
    const auto f = qinqFrame(net, src, dst, 1000, util::mixSeed(seed, dir));
    auto trace = net.sendFromHost(src, f);
    std::string drops;
    for (const auto& d : trace.drops) drops += fmt::format(" {}@{}:{}", netsim::toString(d.reason), d.node, d.port);
    r.expect(trace.receivedBy(dst) == 1 && trace.receptions.size() == 1,
             fmt::format("PW delivers exactly one copy {}->{} (received {}, drops{})", src, dst,
                         trace.receptions.size(), drops));
    if (trace.receptions.size() == 1)
      r.expect(trace.receptions[0].frame.serialize() == f.serialize(), "PW byte-identical Q-in-Q " + src + "->" + dst);
    std::size_t core = 0;
    for (const auto& t : trace.transmissions) {
      const auto* link = m.findLink(t.linkId);
      if (!link || link->kind != topo::LinkKind::Core) continue;
      ++core;
      r.expect(t.frame.ethSrc == addr.interfaceMac(t.from.node, t.from.port) &&
                   t.frame.ethDst == addr.interfaceMac(t.to.node, t.to.port),
               "PW outer MACs on " + t.linkId);
      r.expect(t.frame.wireSize() == f.wireSize() + 14 + 4 + 20 + 4, "PW core frame size on " + t.linkId);
      r.expect(t.frame.mplsStack.size() == 1, "PW single label on " + t.linkId);
    }
    if (sel.pw[0].ep.pe != sel.pw[1].ep.pe) r.expect(core > 0, "PW crosses the core");
  }
}

void checkVll(Report& r, netsim::Network& net, const Selection& sel) {
  for (int dir = 0; dir < 2; ++dir) {
    const auto& src = sel.vll[dir].ce;
    const auto& dst = sel.vll[1 - dir].ce;
    const auto ipf = net.hostUdpFrame(src, dst, 800, true);
    auto t1 = net.sendFromHost(src, ipf);
    r.expect(t1.receivedBy(dst) == 1 && t1.receptions.size() == 1, "VLL IP delivered once " + src + "->" + dst);
    if (t1.receptions.size() == 1) r.expect(t1.receptions[0].frame == ipf, "VLL IP frame unchanged " + src + "->" + dst);
    const auto arp = netsim::makeArpRequest(net.host(src).mac, net.host(src).address, net.host(dst).address);
    auto t2 = net.sendFromHost(src, arp);
    r.expect(t2.receivedBy(dst) == 1 && t2.receptions.size() == 1, "VLL ARP delivered once " + src + "->" + dst);
    if (t2.receptions.size() == 1) {
      const auto& got = t2.receptions[0].frame;
      r.expect(got == arp && got.ethertype == netsim::kEthArp, "VLL ARP frame unchanged " + src + "->" + dst);
    }
  }
}

void checkVss(Report& r, netsim::Network& net, const Selection& sel) {
  for (const auto& s : sel.vss) {
    auto f = net.hostUdpFrame(s.ce, sel.vss[0].ce == s.ce ? sel.vss[1].ce : sel.vss[0].ce, 400, true);
    f.ethDst = MacAddr::broadcast();
    auto trace = net.sendFromHost(s.ce, f);
    bool once = trace.receptions.size() == sel.vss.size() - 1 && trace.receivedBy(s.ce) == 0;
    for (const auto& o : sel.vss)
      if (o.ce != s.ce) once = once && trace.receivedBy(o.ce) == 1;
    r.expect(once, "VSS broadcast from " + s.ce + " reaches every other site once");
  }
  // Every site has broadcast, so every bridge knows every MAC.
  for (const auto& a : sel.vss)
    for (const auto& b : sel.vss) {
      if (a.ce == b.ce) continue;
      auto trace = net.sendFromHost(a.ce, net.hostUdpFrame(a.ce, b.ce, 400, true));
      r.expect(trace.receptions.size() == 1 && trace.receivedBy(b.ce) == 1, "VSS unicast " + a.ce + "->" + b.ce);
      std::map<std::pair<std::string, std::string>, int> perDir;
      bool single = true;
      for (const auto& t : trace.transmissions) single = single && ++perDir[{t.linkId, t.from.node}] == 1;
      r.expect(single, "VSS unicast single path " + a.ce + "->" + b.ce);
    }
}

void checkLabels(Report& r, const ctrl::Controller& c) {
  std::map<std::tuple<std::string, std::string, std::uint32_t>, std::string> seen;
  for (const auto& [id, rec] : c.services())
    for (const auto& sbp : rec.sbps)
      for (std::size_t i = 1; i < sbp.path.size(); ++i) {
        const auto* link = c.network().model().linkAt(sbp.path[i].node, sbp.path[i].inPort);
        if (!link) continue;
        const auto key = std::make_tuple(link->id, sbp.path[i].node, sbp.labels.at(link->id));
        auto [it, fresh] = seen.emplace(key, sbp.sbpId);
        r.expect(fresh, fmt::format("label {} on {} towards {} shared by {} and {}", std::get<2>(key), link->id,
                                    sbp.path[i].node, it->second, sbp.sbpId));
      }
  // Table 1: one owner per (in port, label).
  for (const auto& id : c.network().oshiIds()) {
    std::map<std::pair<std::string, std::uint32_t>, std::set<std::string>> owners;
    for (const auto& rule : c.network().oshi(id).table1.rules())
      if (rule.match.inPort && rule.match.mplsLabel) owners[{*rule.match.inPort, *rule.match.mplsLabel}].insert(rule.owner);
    for (const auto& [k, o] : owners) r.expect(o.size() == 1, fmt::format("{}:{} label {} has {} owners", id, k.first, k.second, o.size()));
  }
}

}  // namespace

Report checkServices(const topo::TopologyModel& model, std::uint64_t seed) {
  Report r;
  const auto sel = select(model, seed);
  if (sel.vss.size() < 4 || sel.pw.size() < 2 || sel.vll.size() < 2 || sel.free.empty()) {
    r.expect(false, "topology has too few customer edges for the service mix");
    return r;
  }
  netsim::NetworkOptions opt;
  opt.recordTransmissions = true;
  auto bare = model;
  bare.services.clear();
  ctrl::Session session(bare, opt);
  auto& net = session.network();
  auto& c = session.controller();
  const auto all = attachments(model);

  const auto baseline = snapshot(net);
  const auto beBefore = bestEffort(net, sel, all);

  const auto vll = spec("prop-vll", topo::ServiceKind::IpVll, sel.vll);
  const auto pw = spec("prop-pw", topo::ServiceKind::Pw, sel.pw);
  const auto vss = spec("prop-vss", topo::ServiceKind::Vss, sel.vss);
  try {
    c.provision(vll);
    c.provision(pw);
    c.provision(vss);
  } catch (const Error& e) {
    r.expect(false, fmt::format("provisioning failed: {} ({})", e.what(), codeName(e.code())));
    return r;
  }

  checkLabels(r, c);

  net.resetCounters();
  r.expect(bestEffort(net, sel, all) == beBefore, "best-effort delivery unchanged by provisioning");
  r.expect(onlyOwners(ownerPackets(net), {netsim::kBootstrapOwner}), "best-effort traffic touches only bootstrap rules");

  net.resetCounters();
  checkVll(r, net, sel);
  r.expect(onlyOwners(ownerPackets(net), {netsim::kBootstrapOwner, vll.id}), "VLL traffic touches only its own rules");

  net.resetCounters();
  checkPw(r, net, sel, seed);
  r.expect(onlyOwners(ownerPackets(net), {netsim::kBootstrapOwner, pw.id}), "PW traffic touches only its own rules");

  net.resetCounters();
  checkVss(r, net, sel);
  r.expect(onlyOwners(ownerPackets(net), {netsim::kBootstrapOwner, vss.id}), "VSS traffic touches only its own rules");

  r.expect(ctrl::verifyControlConnectivity(net).ok(), "control connectivity with services installed");

  for (const auto* id : {&vss.id, &pw.id, &vll.id}) c.teardown(*id);
  r.expect(snapshot(net) == baseline, "teardown restores the baseline tables");
  bool freed = true;
  for (const auto& [link, st] : c.labels().perLink()) freed = freed && c.labels().inUseCount(link) == 0;
  r.expect(freed, "teardown releases every label");
  return r;
}

Report checkControl(const topo::TopologyModel& model) {
  Report r;
  const auto report = ctrl::verifyControlConnectivity(model, netsim::computeFibs(model));
  for (const auto& [node, ctl] : report.unreachable) r.expect(false, node + " cannot reach " + ctl);
  std::size_t oshiNodes = 0;
  for (const auto& n : model.nodes) oshiNodes += topo::isOshi(n.kind);
  r.expect(report.reachable.size() == oshiNodes, "every OSHI node is checked");
  // Nothing but bootstrap rules may exist for the check to be meaningful.
  netsim::Network net(model);
  std::size_t sbpRules = 0;
  for (const auto& id : net.oshiIds()) sbpRules += net.oshi(id).table1.size();
  r.expect(sbpRules == 0, "no SBP rules installed");
  return r;
}

Report checkDeployment(const topo::TopologyModel& model) {
  Report r;
  const auto pool = deploy::ResourcePool::synthetic(model.nodes.size());
  const auto plan = deploy::buildPlan(model, pool, {}, deploy::TunnelKind::Vxlan);
  const auto again = deploy::buildPlan(model, pool, {}, deploy::TunnelKind::Vxlan);

  std::set<std::uint32_t> vnis;
  for (const auto& t : plan.tunnels) vnis.insert(t.vni);
  r.expect(vnis.size() == plan.tunnels.size(), "VNIs unique");
  r.expect(plan.tunnels.size() == model.links.size(), "one tunnel per link");
  for (auto v : vnis) r.expect(v >= 1 && v < (1u << 24), "VNI in 24-bit range");

  std::map<std::string, std::string> inverse;
  for (const auto& [node, vm] : plan.mapping) {
    r.expect(inverse.emplace(vm, node).second, "mapping injective at " + vm);
    r.expect(pool.find(vm) != nullptr, "mapped VM exists: " + vm);
  }
  r.expect(plan.mapping.size() == model.nodes.size(), "every node mapped");
  // Tunnels pulled back through the inverse mapping give the link multiset.
  std::multiset<std::pair<std::string, std::string>> links, pulled;
  auto norm = [](std::string a, std::string b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
  for (const auto& l : model.links) links.insert(norm(l.a.node, l.b.node));
  for (const auto& t : plan.tunnels) {
    auto a = inverse.find(t.endpoints.first), b = inverse.find(t.endpoints.second);
    if (a == inverse.end() || b == inverse.end()) {
      r.expect(false, "tunnel " + t.linkId + " ends on an unmapped VM");
      continue;
    }
    pulled.insert(norm(a->second, b->second));
    const auto* link = model.findLink(t.linkId);
    r.expect(link && plan.mapping.at(link->a.node) == t.endpoints.first && plan.mapping.at(link->b.node) == t.endpoints.second,
             "tunnel " + t.linkId + " joins the VMs of its link ends");
  }
  r.expect(links == pulled, "overlay isomorphic to the link graph");

  r.expect(plan.toJson().dump() == again.toJson().dump(), "plan regeneration byte-identical");
  const auto cfg = deploy::emitConfigs(model, plan, pool);
  bool same = cfg.size() == plan.nodeConfigs.size();
  for (const auto& [id, doc] : cfg) same = same && plan.nodeConfigs.count(id) && doc.toJson().dump() == plan.nodeConfigs.at(id).toJson().dump();
  r.expect(same, "config regeneration byte-identical");
  return r;
}

}  // namespace testing
