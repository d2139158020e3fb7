#include <doctest.h>

#include <set>

#include "oshi/deploy/plan.hpp"
#include "oshi/topo/builder.hpp"
#include "support/errors.hpp"
#include "support/fixtures.hpp"

using namespace oshi;
using namespace oshi::deploy;
using testing::errorOf;

namespace {

ResourcePool firstVms(std::size_t n) {
  auto pool = ResourcePool::fromJson(util::readJsonFile(testing::fixturePath("resources.json")));
  pool.vms.resize(n);
  return pool;
}

topo::TopologyModel crRing(int n) {
  topo::TopologyBuilder b("ring");
  for (int i = 1; i <= n; ++i) b.cr("cr" + std::to_string(i));
  for (int i = 1; i <= n; ++i) b.link("cr" + std::to_string(i), "cr" + std::to_string(i % n + 1));
  return b.build();
}

std::size_t countOps(const ConfigDoc& doc, const std::string& op) {
  std::size_t n = 0;
  for (const auto& d : doc.config) n += d.at("op") == op;
  return n;
}

}  // namespace

TEST_SUITE("resources") {
  TEST_CASE("resource file forms") {
    auto j = util::readJsonFile(testing::fixturePath("resources.json"));
    auto a = ResourcePool::fromJson(j);
    auto b = ResourcePool::fromJson(nlohmann::json{{"vms", j}});
    CHECK(a.vms.size() == 8);
    CHECK(a.vms == b.vms);
    CHECK(ResourcePool::fromJson(a.toJson()).vms == a.vms);
    CHECK(a.find("vm3")->mgmtAddress.str() == "192.168.56.103");
    CHECK(a.find("vm99") == nullptr);
  }

  TEST_CASE("duplicates are rejected") {
    auto j = util::readJsonFile(testing::fixturePath("resources.json"));
    auto dupId = j;
    dupId[1]["vmId"] = "vm1";
    CHECK(errorOf([&] { ResourcePool::fromJson(dupId); }) == ErrorCode::SchemaViolation);
    auto dupAddr = j;
    dupAddr[1]["mgmtAddress"] = j[0]["mgmtAddress"];
    CHECK(errorOf([&] { ResourcePool::fromJson(dupAddr); }) == ErrorCode::SchemaViolation);
    CHECK(errorOf([&] { ResourcePool::fromJson(nlohmann::json{{{"vmId", "x"}}}); }) == ErrorCode::SchemaViolation);
  }
}

TEST_SUITE("mapping") {
  TEST_CASE("five nodes on five VMs in sorted order") {
    auto m = testing::fixtureModel("five_node.json");
    auto map = mapNodes(m, firstVms(5));
    CHECK(map == Mapping{{"ce1", "vm1"}, {"cr1", "vm2"}, {"ctl1", "vm3"}, {"pe1", "vm4"}, {"pe2", "vm5"}});
  }

  TEST_CASE("too few VMs") {
    auto m = testing::fixtureModel("five_node.json");
    CHECK(errorOf([&] { mapNodes(m, firstVms(4)); }) == ErrorCode::InsufficientVms);
  }

  TEST_CASE("overrides are honored first") {
    auto m = testing::fixtureModel("five_node.json");
    auto pool = ResourcePool::synthetic(9);
    auto map = mapNodes(m, pool, {{"pe1", "vm9"}});
    CHECK(map == Mapping{{"ce1", "vm1"}, {"cr1", "vm2"}, {"ctl1", "vm3"}, {"pe1", "vm9"}, {"pe2", "vm4"}});
    // An override may take a VM another node would have got.
    auto map2 = mapNodes(m, pool, {{"pe2", "vm1"}});
    CHECK(map2.at("pe2") == "vm1");
    CHECK(map2.at("ce1") == "vm2");
  }

  TEST_CASE("override errors") {
    auto m = testing::fixtureModel("five_node.json");
    auto pool = ResourcePool::synthetic(9);
    CHECK(errorOf([&] { mapNodes(m, pool, {{"pe1", "vm42"}}); }) == ErrorCode::UnknownVm);
    CHECK(errorOf([&] { mapNodes(m, pool, {{"pe1", "vm2"}, {"pe2", "vm2"}}); }) == ErrorCode::ConflictingOverrides);
    CHECK(errorOf([&] { mapNodes(m, pool, {{"ghost", "vm2"}}); }) == ErrorCode::InvalidArgument);
    // Overrides count against the pool size too.
    CHECK(errorOf([&] { mapNodes(m, firstVms(4), {{"pe1", "vm1"}}); }) == ErrorCode::InsufficientVms);
  }
}

TEST_SUITE("overlay") {
  TEST_CASE("seven links: VNIs 1..7 in link-id order") {
    auto m = crRing(7);
    auto map = mapNodes(m, ResourcePool::synthetic(7));
    auto tunnels = planOverlay(m, map, TunnelKind::Vxlan);
    REQUIRE(tunnels.size() == 7);
    std::set<std::string> ids;
    for (const auto& l : m.links) ids.insert(l.id);
    std::size_t i = 0;
    for (const auto& id : ids) {
      CHECK(tunnels[i].linkId == id);
      CHECK(tunnels[i].vni == i + 1);
      CHECK(tunnels[i].kind == TunnelKind::Vxlan);
      ++i;
    }
  }

  TEST_CASE("parallel links between one VM pair get separate tunnels") {
    topo::TopologyBuilder b;
    b.cr("a").cr("b");
    b.link("a", "b");
    b.link("a", "b");
    auto m = b.build();
    auto tunnels = planOverlay(m, mapNodes(m, ResourcePool::synthetic(2)), TunnelKind::Userspace);
    REQUIRE(tunnels.size() == 2);
    CHECK(tunnels[0].endpoints == tunnels[1].endpoints);
    CHECK(tunnels[0].vni != tunnels[1].vni);
    CHECK(tunnels[0].kind == TunnelKind::Userspace);
  }

  TEST_CASE("ring of five maps to a ring of VMs") {
    auto m = crRing(5);
    auto map = mapNodes(m, ResourcePool::synthetic(5));
    auto tunnels = planOverlay(m, map, TunnelKind::Vxlan);
    REQUIRE(tunnels.size() == 5);
    std::map<std::string, std::set<std::string>> adj;
    for (const auto& t : tunnels) {
      adj[t.endpoints.first].insert(t.endpoints.second);
      adj[t.endpoints.second].insert(t.endpoints.first);
    }
    CHECK(adj.size() == 5);
    for (const auto& [vm, n] : adj) CHECK(n.size() == 2);
    // Walk the cycle.
    std::string prev, cur = adj.begin()->first;
    std::set<std::string> seen;
    for (int i = 0; i < 5; ++i) {
      seen.insert(cur);
      auto next = *adj[cur].begin() == prev ? *adj[cur].rbegin() : *adj[cur].begin();
      prev = cur;
      cur = next;
    }
    CHECK(seen.size() == 5);
    CHECK(cur == adj.begin()->first);
    // Same ring as the links, under the mapping.
    for (const auto& l : m.links) CHECK(adj[map.at(l.a.node)].count(map.at(l.b.node)));
  }

  TEST_CASE("unmapped node") {
    auto m = crRing(3);
    CHECK(errorOf([&] { planOverlay(m, {{"cr1", "vm1"}, {"cr2", "vm2"}}, TunnelKind::Vxlan); }) == ErrorCode::UnmappedNode);
  }

  TEST_CASE("tunnel kind names") {
    CHECK(parseTunnelKind("vxlan") == TunnelKind::Vxlan);
    CHECK(parseTunnelKind("userspace") == TunnelKind::Userspace);
    CHECK(errorOf([] { parseTunnelKind("ipsec"); }) == ErrorCode::UnknownKind);
  }
}

TEST_SUITE("configs") {
  TEST_CASE("same plan, same bytes") {
    auto m = testing::fixtureModel("five_node.json");
    auto pool = firstVms(8);
    auto a = buildPlan(m, pool, {}, TunnelKind::Vxlan);
    auto b = buildPlan(m, pool, {}, TunnelKind::Vxlan);
    CHECK(a.toJson().dump(2) == b.toJson().dump(2));
    auto again = emitConfigs(m, a, pool);
    for (const auto& [id, doc] : again) CHECK(doc.toJson().dump() == a.nodeConfigs.at(id).toJson().dump());
  }

  TEST_CASE("CE configs carry no switch directives") {
    auto m = testing::fixtureModel("five_node.json");
    auto plan = buildPlan(m, firstVms(8), {}, TunnelKind::Vxlan);
    const auto& ce = plan.nodeConfigs.at("ce1");
    for (const auto* op : {"ofcs-bootstrap", "internal-port", "controller", "loopback", "routing"}) CHECK(countOps(ce, op) == 0);
    CHECK(countOps(ce, "default-route") == 1);
    const auto& pe = plan.nodeConfigs.at("pe1");
    CHECK(countOps(pe, "ofcs-bootstrap") == 1);
    CHECK(countOps(pe, "routing") == 1);
    CHECK(countOps(pe, "controller") == 1);
    CHECK(pe.setup[0].at("role") == "PE");
  }

  TEST_CASE("middle node of a three-node chain has two tunnels") {
    topo::TopologyBuilder b;
    b.cr("a").cr("b").cr("c");
    b.link("a", "b");
    b.link("b", "c");
    auto m = b.build();
    auto plan = buildPlan(m, ResourcePool::synthetic(3), {}, TunnelKind::Vxlan);
    CHECK(countOps(plan.nodeConfigs.at("b"), "tunnel") == 2);
    CHECK(countOps(plan.nodeConfigs.at("a"), "tunnel") == 1);
    std::set<int> vnis;
    for (const auto& d : plan.nodeConfigs.at("b").config)
      if (d.at("op") == "tunnel") vnis.insert(d.at("vni").get<int>());
    CHECK(vnis == std::set<int>{1, 2});
  }

  TEST_CASE("addressing directives follow the scheme") {
    auto m = testing::fixtureModel("five_node.json");
    auto plan = buildPlan(m, firstVms(8), {}, TunnelKind::Vxlan);
    const auto& cr = plan.nodeConfigs.at("cr1").config;
    bool loop = false;
    std::set<std::string> ifaces;
    for (const auto& d : cr) {
      if (d.at("op") == "loopback") loop = d.at("address") == "10.0.0.3/32";
      if (d.at("op") == "interface") ifaces.insert(d.at("address").get<std::string>());
    }
    CHECK(loop);
    // cr1 is the b side of l2 and the a side of l3.
    CHECK(ifaces == std::set<std::string>{"10.1.2.2/30", "10.1.3.1/30"});
    // Setup strictly precedes config: every setup op is a role or package step.
    for (const auto& [id, doc] : plan.nodeConfigs)
      for (const auto& d : doc.setup) CHECK((d.at("op") == "install-role" || d.at("op") == "install-packages"));
  }

  TEST_CASE("encapsulation overheads") {
    CHECK(overheadOf("pw-gre") == 24);
    CHECK(overheadOf("vxlan") == 14 + 20 + 8 + 8);
    CHECK(overheadOf("eompls-reference") == 14 + 4);
    CHECK(overheadOf("eompls-reference") + overheadOf("pw-gre") == 42);
    CHECK(errorOf([] { overheadOf("mystery"); }) == ErrorCode::UnknownKind);
  }
}
