#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include <json.hpp>

namespace oshi::netsim {

// Additive per-operation CPU model. All constants are CPU-seconds per packet;
// `budget` is CPU-seconds available per second (one core = 1.0).
struct CostModel {
  double cOfcsLookup = 0;
  double cIpForward = 0;
  double cMplsOp = 0;
  double cAceGre = 0;
  double cVxlanEncap = 0;
  double cOpenVpnEncap = 0;
  double cUserspaceMiss = 0;
  double budget = 1.0;
  // Relative standard deviation of multiplicative noise applied to CPU
  // samples by the experiment runner; 0 keeps the model deterministic.
  double noiseRelStd = 0;

  // Default constants, calibrated on the reference scenarios:
  //   router IP forwarding saturates at 14000 p/s, OSHI IP at 12500 p/s,
  //   a VLL label-switching node costs 76 us/packet, a PW adds 18% at the PE,
  //   VXLAN costs 8% and OpenVPN brings OSHI IP down to 3500 p/s, and a
  //   user-space (flow-cache miss) traversal costs 94/40 of a kernel one.
  static CostModel calibrated();

  // Throws Error{InvalidArgument} if any constant is negative or budget <= 0.
  void check() const;

  nlohmann::json toJson() const;
  // Missing keys keep their calibrated value.
  static CostModel fromJson(const nlohmann::json& j);

  bool operator==(const CostModel&) const = default;
};

enum class Tunneling { None, Vxlan, OpenVpn };
std::string_view toString(Tunneling t);
Tunneling parseTunneling(std::string_view text);

// Cost charged to a node for each frame it sends or receives over an
// emulated link.
double tunnelCost(const CostModel& model, Tunneling t);

enum class FlowCacheMode {
  None,           // feature off: every traversal charged the normal pipeline cost
  Kernel,         // first packet of a flow key takes the user-space path, the rest hit
  UserspaceOnly,  // no kernel cache: every packet takes the user-space path
};
std::string_view toString(FlowCacheMode m);
FlowCacheMode parseFlowCacheMode(std::string_view text);

enum class DropReason {
  NoRule,
  NoSbpMatch,
  TtlExpired,
  MplsTtlExpired,
  NoRoute,
  NotIp,
  UnknownVtep,
  UnboundPort,
  NotForHost,
  NoLink,
  RuleDrop,
  LoopGuard,
  NotDelivered,
};
std::string_view toString(DropReason r);

struct CounterSet {
  std::uint64_t pkts = 0;
  std::uint64_t bytes = 0;
  double cost = 0;
  double maxPacketCost = 0;
  std::uint64_t dropped = 0;
  std::map<std::string, std::uint64_t> drops;

  void drop(DropReason r) {
    ++dropped;
    ++drops[std::string(toString(r))];
  }
};

}  // namespace oshi::netsim
