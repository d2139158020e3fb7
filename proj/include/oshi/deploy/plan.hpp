#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oshi/topo/addr.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::deploy {

struct Vm {
  std::string vmId;
  topo::Ipv4Addr mgmtAddress;
  std::string server;

  bool operator==(const Vm&) const = default;
};

struct ResourcePool {
  std::vector<Vm> vms;

  const Vm* find(const std::string& vmId) const;
  // Accepts a list of {vmId, mgmtAddress, server} or {"vms": [...]}.
  // Throws Error{SchemaViolation} (also for duplicate ids or addresses).
  static ResourcePool fromJson(const nlohmann::json& j);
  nlohmann::json toJson() const;
  // vm1..vmN on 192.168.100.1.., alternating between two servers.
  static ResourcePool synthetic(std::size_t n);
};

using Mapping = std::map<std::string, std::string>;  // node id -> vm id

// Every node gets a VM: overrides first, then the remaining nodes in sorted
// id order take the free VMs in pool order. Throws Error{InsufficientVms},
// Error{UnknownVm}, Error{ConflictingOverrides} or Error{InvalidArgument}
// for an override naming an unknown node.
Mapping mapNodes(const topo::TopologyModel& model, const ResourcePool& pool, const Mapping& overrides = {});

enum class TunnelKind { Vxlan, Userspace };
std::string_view toString(TunnelKind k);
TunnelKind parseTunnelKind(std::string_view text);

struct Tunnel {
  std::string linkId;
  std::uint32_t vni = 0;
  std::pair<std::string, std::string> endpoints;  // (vm of link end a, vm of link end b)
  TunnelKind kind = TunnelKind::Vxlan;

  bool operator==(const Tunnel&) const = default;
};

// One point-to-point tunnel per link, VNIs 1, 2, ... in sorted link-id
// order. Throws Error{UnmappedNode}.
std::vector<Tunnel> planOverlay(const topo::TopologyModel& model, const Mapping& mapping, TunnelKind kind);

struct ConfigDoc {
  nlohmann::json setup = nlohmann::json::array();
  nlohmann::json config = nlohmann::json::array();

  nlohmann::json toJson() const { return {{"setup", setup}, {"config", config}}; }
  bool operator==(const ConfigDoc&) const = default;
};

struct DeploymentPlan {
  Mapping mapping;
  std::vector<Tunnel> tunnels;
  std::map<std::string, ConfigDoc> nodeConfigs;
  std::map<std::string, int> overheadBytesPerPacket;

  nlohmann::json toJson() const;
};

std::map<std::string, ConfigDoc> emitConfigs(const topo::TopologyModel& model, const DeploymentPlan& plan,
                                             const ResourcePool& pool);

// Per-packet encapsulation overhead in bytes: "vxlan" 50, "pw-gre" 24 (over
// EoMPLS), "eompls-reference" 18, "userspace" 42. Throws Error{UnknownKind}.
int overheadOf(std::string_view kind);

// mapNodes + planOverlay + emitConfigs.
DeploymentPlan buildPlan(const topo::TopologyModel& model, const ResourcePool& pool, const Mapping& overrides,
                         TunnelKind kind);

}  // namespace oshi::deploy
