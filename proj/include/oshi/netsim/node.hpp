#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "oshi/netsim/ace.hpp"
#include "oshi/netsim/cost.hpp"
#include "oshi/netsim/flow.hpp"
#include "oshi/netsim/frame.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::netsim {

using topo::Ipv4Prefix;

// Fixed table-0 priorities. Only their relative order matters.
inline constexpr int kPrioMpls = 300;
inline constexpr int kPrioDiscovery = 290;
inline constexpr int kPrioService = 200;
inline constexpr int kPrioBridge = 100;
inline constexpr int kPrioSbp = 100;  // table 1

inline const std::string kBootstrapOwner = "bootstrap";

// Internal port paired with a physical port.
std::string internalPort(const PortId& physical);

struct FibEntry {
  Ipv4Prefix prefix;
  std::string nextHopNode;
  PortId outPort;
  MacAddr nextHopMac;
  bool connected = false;

  bool operator==(const FibEntry&) const = default;
};

// Sorted by decreasing prefix length, then prefix.
using Fib = std::vector<FibEntry>;
void sortFib(Fib& fib);
const FibEntry* longestMatch(const Fib& fib, Ipv4Addr dst);

struct Interface {
  Ipv4Addr address;
  MacAddr mac;
};

struct OshiNodeState {
  std::string nodeId;
  topo::NodeKind role = topo::NodeKind::CoreRouter;
  Ipv4Addr loopback;
  std::vector<PortId> physicalPorts;              // sorted
  std::map<PortId, Interface> interfaces;         // physical port -> address
  std::map<PortId, PortId> portPairs;             // physical -> internal
  std::map<PortId, std::pair<PortId, std::uint16_t>> subinterfaces;  // "eth2.100" -> (eth2, 100)
  FlowTable table0{0};
  FlowTable table1{1};
  Fib fib;
  std::map<std::string, AceState> aces;  // by customer
  std::map<std::string, VbpState> vbps;  // by VSS id
  CounterSet counters;
  std::unordered_map<std::uint64_t, std::uint64_t> flowCache;  // flow key -> hits
  RuleId nextRuleId = 1;

  // Pairs every physical port with internalPort(port).
  void pairAllPorts();

  RuleId installRule(int table, int priority, Match match, std::vector<Action> actions, std::string owner);
  bool removeRule(RuleId id);
  FlowTable& table(int id) { return id == 0 ? table0 : table1; }
  const FlowTable& table(int id) const { return id == 0 ? table0 : table1; }

  bool ownsAddress(Ipv4Addr a) const;
  // Sub-interface name for (port, vlan) if configured.
  std::optional<PortId> subinterfaceFor(const PortId& port, std::uint16_t vlan) const;
};

// Installs the LME bootstrap rules and returns copies of them. Throws
// Error{MissingPortPairs} when a physical port has no internal port.
std::vector<FlowRule> bootstrapTables(OshiNodeState& node, topo::NodeKind role, bool vllMulticastRule);

enum class Destination { Port, Controller, IpEngine, Ace, Vbp, Drop };

struct OfcsOutput {
  Destination destination = Destination::Drop;
  PortId port;  // OFCS port (for IpEngine: the physical port the internal port is paired with)
  Frame frame;
  DropReason reason = DropReason::NoRule;
};

struct OfcsResult {
  std::vector<OfcsOutput> outputs;
  double cost = 0;
  int mplsOps = 0;
};

// One traversal of the two-table pipeline. Updates rule counters; the node's
// per-node counters and flow cache are left to the caller.
OfcsResult ofcsProcess(OshiNodeState& node, const PortId& inPort, const Frame& frame, const CostModel& cost);

struct IpResult {
  enum class Kind { Forward, Local, Drop } kind = Kind::Drop;
  PortId outPort;  // physical port; the frame re-enters the OFCS on its internal port
  Frame frame;
  DropReason reason = DropReason::NoRoute;
  double cost = 0;
};

IpResult ipForward(const OshiNodeState& node, const Frame& frame, const CostModel& cost);

// Header fields that identify a flow in a kernel flow cache (payload excluded).
std::uint64_t flowKey(const PortId& inPort, const Frame& frame);

// Cost of one OFCS traversal under the flow-cache model. `pipelineCost` is the
// normal (cache-hit) cost of the traversal.
double flowCacheCharge(OshiNodeState& node, FlowCacheMode mode, std::uint64_t key, double pipelineCost,
                       const CostModel& cost);

nlohmann::json toJson(const OshiNodeState& node, bool withCounters = true);

}  // namespace oshi::netsim
