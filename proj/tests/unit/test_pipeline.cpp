#include <doctest.h>

#include <algorithm>

#include "oshi/error.hpp"
#include "oshi/netsim/ace.hpp"
#include "oshi/netsim/cost.hpp"
#include "oshi/netsim/flow.hpp"
#include "oshi/netsim/frame.hpp"
#include "oshi/netsim/node.hpp"
#include "oshi/util/rng.hpp"
#include "oracles/oracles.hpp"

using namespace oshi;
using namespace oshi::netsim;

namespace {

MacAddr mac(std::uint64_t v) { return MacAddr{v}; }
Ipv4Addr ip(const char* s) { return *Ipv4Addr::parse(s); }

OshiNodeState makeNode(std::vector<std::string> ports, topo::NodeKind role = topo::NodeKind::CoreRouter,
                       bool vll = true) {
  OshiNodeState n;
  n.nodeId = "n1";
  n.role = role;
  n.physicalPorts = std::move(ports);
  n.pairAllPorts();
  bootstrapTables(n, role, vll);
  return n;
}

Frame udp(std::size_t size = 200) {
  return makeUdpFrame(mac(0x020000000001), mac(0x020000000002), ip("10.9.0.1"), ip("10.9.0.2"), 1000, 2000, size);
}

Frame randomFrame(util::DetRng& rng) {
  Bytes payload(20 + rng.below(200));
  for (auto& b : payload) b = static_cast<std::uint8_t>(rng.next());
  const std::uint16_t types[] = {0x88b5, 0x0806, 0x86dd, 0x1234};
  auto f = makeEthernetFrame(mac(rng.next() & 0xfeffffffffffULL), mac(rng.next() & 0xffffffffffffULL),
                             types[rng.below(4)], std::move(payload));
  for (std::uint64_t i = 0, n = rng.below(3); i < n; ++i) f.vlanTags.push_back(static_cast<std::uint16_t>(1 + rng.below(4094)));
  return f;
}

const CostModel kCost = CostModel::calibrated();

}  // namespace

TEST_SUITE("frame") {
  TEST_CASE("wire size follows the header stack") {
    auto f = udp(1000);
    CHECK(f.wireSize() == 1000);
    CHECK(f.serialize().size() == 1000);
    CHECK(f.valid());
    f.vlanTags = {100, 7};
    CHECK(f.wireSize() == 1000 + 2 * oracle::hdr::kVlanTag);
    CHECK(f.serialize().size() == f.wireSize());
  }

  TEST_CASE("serialization layout") {
    auto f = makeEthernetFrame(mac(0x0a0b0c0d0e0f), mac(0x010203040506), 0x88b5, {0xde, 0xad});
    f.vlanTags = {0x123};
    const auto b = f.serialize();
    const Bytes expect{1, 2, 3, 4, 5, 6, 0x0a, 0x0b, 0x0c, 0x0d, 0x0e, 0x0f, 0x81, 0x00, 0x01, 0x23, 0x88, 0xb5, 0xde, 0xad};
    CHECK(b == expect);
  }

  TEST_CASE("invariant checks") {
    auto f = udp();
    f.ethertype = kEthArp;
    CHECK_FALSE(f.valid());
    f = udp();
    f.mplsStack = {MplsEntry{17, 0, false, 64}};
    f.ethertype = kEthMpls;
    CHECK_FALSE(f.valid());  // bottom-of-stack must be set on the last entry
    f.mplsStack[0].bottomOfStack = true;
    CHECK(f.valid());
    f.mplsStack[0].label = 1u << 20;
    CHECK_FALSE(f.valid());
    f = udp();
    f.ip->totalLen += 1;
    CHECK_FALSE(f.valid());
  }

  TEST_CASE("arp frames") {
    auto req = makeArpRequest(mac(0x020000000001), ip("10.9.0.1"), ip("10.9.0.2"));
    CHECK(req.ethertype == kEthArp);
    CHECK(req.ethDst.isBroadcast());
    CHECK(req.valid());
    CHECK(req.wireSize() == 14 + 28);
  }
}

TEST_SUITE("flow table") {
  TEST_CASE("highest priority wins, then oldest") {
    FlowTable t(0);
    t.install({1, 0, 10, Match{.ethertype = kEthIpv4}, {action::Output{"a"}}, "x"});
    t.install({2, 0, 20, Match{.inPort = "p"}, {action::Output{"b"}}, "x"});
    t.install({3, 0, 10, Match{.inPort = "p"}, {action::Output{"c"}}, "x"});
    auto f = udp();
    CHECK(t.lookup("p", f)->id == 2);
    CHECK(t.lookup("q", f)->id == 1);
    CHECK(t.remove(2));
    CHECK(t.lookup("p", f)->id == 1);
    CHECK_FALSE(t.remove(2));
  }

  TEST_CASE("same priority and match conflicts") {
    FlowTable t(0);
    t.install({1, 0, 10, Match{.inPort = "p"}, {action::Output{"a"}}, "x"});
    CHECK_THROWS_AS(t.install({2, 0, 10, Match{.inPort = "p"}, {action::Output{"b"}}, "y"}), Error);
    CHECK_NOTHROW(t.install({3, 0, 11, Match{.inPort = "p"}, {action::Output{"b"}}, "y"}));
  }

  TEST_CASE("goto only from table 0 to 1") {
    FlowTable t1(1);
    CHECK_THROWS_AS(t1.install({1, 1, 10, Match{}, {action::GotoTable{1}}, "x"}), Error);
    FlowTable t0(0);
    CHECK_THROWS_AS(t0.install({1, 0, 10, Match{}, {action::GotoTable{0}}, "x"}), Error);
    CHECK_NOTHROW(t0.install({2, 0, 10, Match{}, {action::GotoTable{1}}, "x"}));
  }

  TEST_CASE("match fields") {
    auto f = udp();
    f.vlanTags = {5};
    CHECK(Match{.vlan = 5}.matches("p", f));
    CHECK_FALSE(Match{.vlan = 6}.matches("p", f));
    CHECK(Match{.ethDst = f.ethDst}.matches("p", f));
    CHECK_FALSE(Match{.mplsLabel = 17}.matches("p", f));
    CHECK(Match{}.matches("anything", f));
  }
}

TEST_SUITE("bootstrap") {
  TEST_CASE("CR with 3 core ports and the multicast rule: 10 rules") {
    auto n = makeNode({"eth0", "eth1", "eth2"});
    CHECK(n.table0.size() + n.table1.size() == 2 + 2 + 6);
    CHECK(n.table1.size() == 0);
  }

  TEST_CASE("node without ports: ethertype and controller rules only") {
    auto n = makeNode({});
    CHECK(n.table0.size() == 4);
  }

  TEST_CASE("PW-only deployment has no 0x8848 rule") {
    auto n = makeNode({"eth0", "eth1"}, topo::NodeKind::ProviderEdge, false);
    for (const auto& r : n.table0.rules()) CHECK(r.match.ethertype != std::optional<std::uint16_t>(kEthMplsMulticast));
    CHECK(n.table0.size() == 1 + 2 + 4);
  }

  TEST_CASE("priorities") {
    auto n = makeNode({"eth0"});
    for (const auto& r : n.table0.rules()) {
      if (r.match.ethertype == kEthMpls || r.match.ethertype == kEthMplsMulticast) CHECK(r.priority == kPrioMpls);
      if (r.match.ethertype == kEthLldp || r.match.ethertype == kEthBddp) CHECK(r.priority == kPrioDiscovery);
      if (!r.match.ethertype) CHECK(r.priority == kPrioBridge);
    }
    CHECK(kPrioMpls > kPrioDiscovery);
    CHECK(kPrioDiscovery > kPrioService);
    CHECK(kPrioService > kPrioBridge);
  }

  TEST_CASE("missing port pairs") {
    OshiNodeState n;
    n.physicalPorts = {"eth0", "eth1"};
    n.portPairs["eth0"] = internalPort("eth0");
    CHECK_THROWS_AS(bootstrapTables(n, topo::NodeKind::CoreRouter, true), Error);
  }
}

TEST_SUITE("ofcs") {
  TEST_CASE("IP frame on a physical port goes to the paired internal port") {
    auto n = makeNode({"eth0", "eth1"});
    auto r = ofcsProcess(n, "eth0", udp(), kCost);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].destination == Destination::IpEngine);
    CHECK(r.outputs[0].port == "eth0");
    CHECK(r.cost == doctest::Approx(kCost.cOfcsLookup));
    // And back: from the internal port to the physical one.
    auto back = ofcsProcess(n, internalPort("eth1"), udp(), kCost);
    REQUIRE(back.outputs.size() == 1);
    CHECK(back.outputs[0].destination == Destination::Port);
    CHECK(back.outputs[0].port == "eth1");
  }

  TEST_CASE("MPLS swap in table 1") {
    auto n = makeNode({"eth0", "eth1"});
    n.installRule(1, kPrioSbp, Match{.inPort = "eth0", .mplsLabel = 17}, {action::SetMplsLabel{42}, action::Output{"eth1"}}, "svc");
    auto f = udp();
    f.mplsStack = {MplsEntry{17, 0, true, 64}};
    f.ethertype = kEthMpls;
    auto r = ofcsProcess(n, "eth0", f, kCost);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].destination == Destination::Port);
    CHECK(r.outputs[0].port == "eth1");
    CHECK(r.outputs[0].frame.mplsStack[0].label == 42);
    CHECK(r.outputs[0].frame.mplsStack[0].ttl == 63);
    CHECK(r.mplsOps == 1);
    CHECK(r.cost == doctest::Approx(kCost.cOfcsLookup + kCost.cMplsOp));
  }

  TEST_CASE("MPLS TTL expiry on swap") {
    auto n = makeNode({"eth0", "eth1"});
    n.installRule(1, kPrioSbp, Match{.inPort = "eth0", .mplsLabel = 17}, {action::SetMplsLabel{42}, action::Output{"eth1"}}, "svc");
    auto f = udp();
    f.mplsStack = {MplsEntry{17, 0, true, 1}};
    f.ethertype = kEthMpls;
    auto r = ofcsProcess(n, "eth0", f, kCost);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].destination == Destination::Drop);
    CHECK(r.outputs[0].reason == DropReason::MplsTtlExpired);
  }

  TEST_CASE("LLDP and BDDP go to the controller") {
    auto n = makeNode({"eth0"});
    for (auto t : {kEthLldp, kEthBddp}) {
      auto r = ofcsProcess(n, "eth0", makeEthernetFrame(mac(1), mac(0x0180c200000e), t, Bytes(30)), kCost);
      REQUIRE(r.outputs.size() == 1);
      CHECK(r.outputs[0].destination == Destination::Controller);
    }
  }

  TEST_CASE("table-1 miss and table-0 miss") {
    auto n = makeNode({"eth0"});
    auto f = udp();
    f.mplsStack = {MplsEntry{99, 0, true, 64}};
    f.ethertype = kEthMpls;
    auto r = ofcsProcess(n, "eth0", f, kCost);
    REQUIRE(r.outputs.size() == 1);
    CHECK(r.outputs[0].reason == DropReason::NoSbpMatch);
    auto miss = ofcsProcess(n, "nowhere", udp(), kCost);
    REQUIRE(miss.outputs.size() == 1);
    CHECK(miss.outputs[0].reason == DropReason::NoRule);
  }

  TEST_CASE("ethertype guard: IP frames never match table 1") {
    auto n = makeNode({"eth0", "eth1"});
    n.installRule(0, 400, Match{.inPort = "eth0"}, {action::GotoTable{1}}, "svc");
    n.installRule(1, kPrioSbp, Match{}, {action::Output{"eth1"}}, "svc");
    for (auto f : {udp(), makeArpRequest(mac(1), ip("10.9.0.1"), ip("10.9.0.2"))}) {
      auto r = ofcsProcess(n, "eth0", f, kCost);
      REQUIRE(r.outputs.size() == 1);
      CHECK(r.outputs[0].reason == DropReason::NoSbpMatch);
    }
  }

  TEST_CASE("push and pop keep the stack well formed") {
    auto n = makeNode({"eth0", "eth1"}, topo::NodeKind::ProviderEdge);
    n.installRule(0, kPrioService, Match{.inPort = "eth0", .ethertype = kEthIpv4},
                  {action::PushMpls{20, kEthMpls}, action::PushMpls{21, kEthMpls}, action::Output{"eth1"}}, "svc");
    auto r = ofcsProcess(n, "eth0", udp(), kCost);
    REQUIRE(r.outputs.size() == 1);
    const auto& out = r.outputs[0].frame;
    REQUIRE(out.mplsStack.size() == 2);
    CHECK(out.mplsStack[0].label == 21);
    CHECK_FALSE(out.mplsStack[0].bottomOfStack);
    CHECK(out.mplsStack[1].bottomOfStack);
    CHECK(out.mplsStack[0].ttl == 255);
    CHECK(out.ethertype == kEthMpls);
    CHECK(out.valid());
    CHECK(r.mplsOps == 2);

    n.installRule(0, kPrioMpls + 10, Match{.inPort = "eth1", .ethertype = kEthMpls},
                  {action::PopMpls{kEthIpv4}, action::PopMpls{kEthIpv4}, action::Output{"eth0"}}, "svc");
    auto back = ofcsProcess(n, "eth1", out, kCost);
    REQUIRE(back.outputs.size() == 1);
    CHECK(back.outputs[0].frame == udp());
  }

  TEST_CASE("rule counters") {
    auto n = makeNode({"eth0", "eth1"});
    ofcsProcess(n, "eth0", udp(300), kCost);
    ofcsProcess(n, "eth0", udp(300), kCost);
    std::uint64_t pkts = 0, bytes = 0;
    for (const auto& r : n.table0.rules()) pkts += r.counters.packets, bytes += r.counters.bytes;
    CHECK(pkts == 2);
    CHECK(bytes == 600);
  }

  TEST_CASE("purity: same state and input give the same output") {
    auto a = makeNode({"eth0", "eth1"});
    auto b = makeNode({"eth0", "eth1"});
    auto ra = ofcsProcess(a, "eth0", udp(), kCost);
    auto rb = ofcsProcess(b, "eth0", udp(), kCost);
    REQUIRE(ra.outputs.size() == rb.outputs.size());
    CHECK(ra.outputs[0].frame == rb.outputs[0].frame);
    CHECK(ra.cost == rb.cost);
  }
}

TEST_SUITE("ip engine") {
  OshiNodeState routed() {
    auto n = makeNode({"eth0", "eth1"});
    n.loopback = ip("10.0.0.1");
    n.interfaces["eth0"] = {ip("10.1.1.1"), mac(0x020000010001)};
    n.interfaces["eth1"] = {ip("10.1.2.1"), mac(0x020000010002)};
    n.fib = {{*Ipv4Prefix::parse("10.9.0.0/24"), "n2", "eth1", mac(0x020000020001), false},
             {*Ipv4Prefix::parse("10.9.0.0/16"), "n3", "eth0", mac(0x020000030001), false}};
    sortFib(n.fib);
    return n;
  }

  TEST_CASE("longest prefix, ttl and MAC rewrite") {
    auto n = routed();
    auto r = ipForward(n, udp(), kCost);
    REQUIRE(r.kind == IpResult::Kind::Forward);
    CHECK(r.outPort == "eth1");
    CHECK(r.frame.ip->ttl == 63);
    CHECK(r.frame.ethSrc == mac(0x020000010002));
    CHECK(r.frame.ethDst == mac(0x020000020001));
    CHECK(r.cost == kCost.cIpForward);
    auto far = udp();
    far.ip->dst = ip("10.9.7.7");
    CHECK(ipForward(n, far, kCost).outPort == "eth0");
  }

  TEST_CASE("ttl 1 expires") {
    auto f = udp();
    f.ip->ttl = 1;
    auto r = ipForward(routed(), f, kCost);
    CHECK(r.kind == IpResult::Kind::Drop);
    CHECK(r.reason == DropReason::TtlExpired);
  }

  TEST_CASE("own address is delivered locally") {
    auto f = udp();
    f.ip->dst = ip("10.1.2.1");
    CHECK(ipForward(routed(), f, kCost).kind == IpResult::Kind::Local);
    f.ip->dst = ip("10.0.0.1");
    CHECK(ipForward(routed(), f, kCost).kind == IpResult::Kind::Local);
  }

  TEST_CASE("no route") {
    auto f = udp();
    f.ip->dst = ip("192.168.1.1");
    CHECK(ipForward(routed(), f, kCost).reason == DropReason::NoRoute);
  }

  TEST_CASE("MPLS frames are never handed to the IP engine") {
    auto f = udp();
    f.mplsStack = {MplsEntry{17, 0, true, 64}};
    f.ethertype = kEthMpls;
    CHECK(ipForward(routed(), f, kCost).reason == DropReason::NotIp);
  }
}

TEST_SUITE("ace") {
  AceState ace() {
    AceState a;
    a.customerId = "c1";
    a.localPorts = {"eth0"};
    a.grePort = {ip("10.254.1.2"), mac(0x0afe00010002), {{ip("10.254.1.5"), mac(0x0afe00010005)}}};
    a.pwBindings["eth0"] = {ip("10.254.1.5"), "pw1"};
    return a;
  }

  TEST_CASE("100-byte customer frame becomes a 138-byte GRE frame") {
    auto inner = makeEthernetFrame(mac(0x020000000001), mac(0x020000000002), 0x88b5, Bytes(86));
    REQUIRE(inner.wireSize() == 100);
    auto out = aceEncap(ace(), "eth0", inner);
    CHECK(out.wireSize() == 100 + oracle::hdr::kEthernet + oracle::hdr::kIpv4 + oracle::hdr::kGreBase);
    CHECK(out.wireSize() == 138);
    CHECK(out.ethSrc == mac(0x0afe00010002));
    CHECK(out.ethDst == mac(0x0afe00010005));
    CHECK(out.ip->proto == 47);
    CHECK(out.ip->src == ip("10.254.1.2"));
    CHECK(out.ip->dst == ip("10.254.1.5"));
    CHECK(out.gre->protocolType == 0x6558);
    CHECK(out.valid());
  }

  TEST_CASE("decap inverts encap for arbitrary frames") {
    util::DetRng rng(5);
    for (int i = 0; i < 200; ++i) {
      const auto f = randomFrame(rng);
      // The remote side sees the frame with swapped roles.
      auto remote = ace();
      remote.grePort = {ip("10.254.1.5"), mac(0x0afe00010005), {{ip("10.254.1.2"), mac(0x0afe00010002)}}};
      remote.pwBindings["eth9"] = {ip("10.254.1.2"), "pw1"};
      auto [port, back] = aceDecap(remote, aceEncap(ace(), "eth0", f));
      CHECK(port == "eth9");
      CHECK(back == f);
      CHECK(back.serialize() == f.serialize());
    }
  }

  TEST_CASE("errors") {
    auto f = udp();
    CHECK_THROWS_AS(aceEncap(ace(), "eth7", f), Error);
    auto noArp = ace();
    noArp.grePort.staticArp.clear();
    try {
      aceEncap(noArp, "eth0", f);
      FAIL("expected UNKNOWN_VTEP");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownVtep);
    }
    // A GRE frame from a VTEP that is not bound here.
    auto stranger = ace();
    stranger.grePort = {ip("10.254.1.9"), mac(0x0afe00010009), {{ip("10.254.1.2"), mac(0x0afe00010002)}}};
    stranger.pwBindings["eth0"] = {ip("10.254.1.2"), "pw9"};
    try {
      aceDecap(ace(), aceEncap(stranger, "eth0", f));
      FAIL("expected UNKNOWN_VTEP");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::UnknownVtep);
    }
  }
}

TEST_SUITE("vbp") {
  VbpState bridge() {
    VbpState v;
    v.vssId = "vss1";
    v.remotePorts = {"p1", "p2", "p3"};
    return v;
  }

  std::vector<std::string> ports(const std::vector<std::pair<PortId, Frame>>& out) {
    std::vector<std::string> p;
    for (const auto& o : out) p.push_back(o.first);
    std::sort(p.begin(), p.end());
    return p;
  }

  TEST_CASE("broadcast floods all other ports") {
    auto v = bridge();
    auto f = udp();
    f.ethDst = MacAddr::broadcast();
    CHECK(ports(vbpForward(v, "p1", f)) == std::vector<std::string>{"p2", "p3"});
  }

  TEST_CASE("first frame floods, the reply is unicast to the learned port") {
    auto v = bridge();
    auto f = udp();
    CHECK(ports(vbpForward(v, "p2", f)) == std::vector<std::string>{"p1", "p3"});
    auto reply = f;
    std::swap(reply.ethSrc, reply.ethDst);
    CHECK(ports(vbpForward(v, "p3", reply)) == std::vector<std::string>{"p2"});
    CHECK(v.macTable.at(f.ethSrc) == "p2");
  }

  TEST_CASE("frame for a MAC learned on the ingress port is not reflected") {
    auto v = bridge();
    auto f = udp();
    vbpForward(v, "p1", f);
    auto g = f;
    std::swap(g.ethSrc, g.ethDst);
    g.ethSrc = mac(0x020000000009);
    CHECK(vbpForward(v, "p1", g).empty());
  }
}

TEST_SUITE("flow cache") {
  TEST_CASE("single-packet flows are all misses") {
    OshiNodeState n;
    for (std::uint64_t k = 0; k < 100; ++k)
      CHECK(flowCacheCharge(n, FlowCacheMode::Kernel, k, 1e-5, kCost) == kCost.cUserspaceMiss);
  }

  TEST_CASE("a 1000-packet flow is charged exactly one miss") {
    OshiNodeState n;
    int misses = 0;
    for (int i = 0; i < 1000; ++i) misses += flowCacheCharge(n, FlowCacheMode::Kernel, 77, 1e-5, kCost) == kCost.cUserspaceMiss;
    CHECK(misses == 1);
  }

  TEST_CASE("cache disabled and userspace-only modes") {
    OshiNodeState n;
    CHECK(flowCacheCharge(n, FlowCacheMode::None, 1, 1e-5, kCost) == 1e-5);
    CHECK(flowCacheCharge(n, FlowCacheMode::UserspaceOnly, 1, 1e-5, kCost) == kCost.cUserspaceMiss);
    CHECK(n.flowCache.empty());
  }

  TEST_CASE("flow key ignores payload and TTL but not ports") {
    auto a = udp(), b = udp(900);
    b.ip->ttl = 3;
    b.syncLengths();
    CHECK(flowKey("eth0", a) == flowKey("eth0", b));
    b.udp->srcPort = 1001;
    CHECK(flowKey("eth0", a) != flowKey("eth0", b));
    CHECK(flowKey("eth0", a) != flowKey("eth1", a));
  }
}

TEST_SUITE("cost model") {
  TEST_CASE("calibration anchors") {
    const auto c = CostModel::calibrated();
    CHECK(c.budget / c.cIpForward == doctest::Approx(14000));
    CHECK(c.budget / (2 * c.cOfcsLookup + c.cIpForward) == doctest::Approx(12500));
    CHECK(c.cUserspaceMiss / (c.cOfcsLookup + c.cMplsOp) == doctest::Approx(94.0 / 40.0));
    c.check();
  }

  TEST_CASE("json round-trip and defaults") {
    auto c = CostModel::calibrated();
    c.cMplsOp = 1e-6;
    CHECK(CostModel::fromJson(c.toJson()) == c);
    CHECK(CostModel::fromJson(nlohmann::json::object()) == CostModel::calibrated());
    auto bad = c;
    bad.cIpForward = -1;
    CHECK_THROWS_AS(bad.check(), Error);
  }

  TEST_CASE("enum names") {
    CHECK(parseTunneling("vxlan") == Tunneling::Vxlan);
    CHECK(parseFlowCacheMode("kernel") == FlowCacheMode::Kernel);
    CHECK(toString(DropReason::NoSbpMatch) == "NO_SBP_MATCH");
    CHECK_THROWS_AS(parseTunneling("ipsec"), Error);
  }
}
