#include "oshi/netsim/cost.hpp"

#include "oshi/error.hpp"

namespace oshi::netsim {

CostModel CostModel::calibrated() {
  constexpr double kRouterIp = 1.0 / 14000;  // plain router: one IP-engine pass
  constexpr double kOshiIp = 1.0 / 12500;    // two OFCS traversals + one IP-engine pass
  constexpr double kVllNode = 76e-6;         // one OFCS traversal with one MPLS action
  constexpr double kPwPenalty = 0.18;        // ACE + second OFCS pass, relative to VLL
  constexpr double kVxlanSat = 0.92 / kOshiIp;
  constexpr double kOpenVpnSat = 3500;
  constexpr double kMissOverHit = 94.0 / 40.0;

  CostModel m;
  m.cIpForward = kRouterIp;
  m.cOfcsLookup = (kOshiIp - kRouterIp) / 2;
  m.cMplsOp = kVllNode - m.cOfcsLookup;
  m.cAceGre = kPwPenalty * kVllNode - m.cOfcsLookup;
  // A transit node receives and sends every packet over a tunnel.
  m.cVxlanEncap = (1.0 / kVxlanSat - kOshiIp) / 2;
  m.cOpenVpnEncap = (1.0 / kOpenVpnSat - kOshiIp) / 2;
  m.cUserspaceMiss = kMissOverHit * kVllNode;
  m.budget = 1.0;
  return m;
}

void CostModel::check() const {
  for (double c : {cOfcsLookup, cIpForward, cMplsOp, cAceGre, cVxlanEncap, cOpenVpnEncap, cUserspaceMiss, noiseRelStd})
    if (!(c >= 0)) throw Error(ErrorCode::InvalidArgument, "cost model constants must be >= 0");
  if (!(budget > 0)) throw Error(ErrorCode::InvalidArgument, "cost model budget must be > 0");
}

nlohmann::json CostModel::toJson() const {
  return {{"cOfcsLookup", cOfcsLookup},     {"cIpForward", cIpForward},       {"cMplsOp", cMplsOp},
          {"cAceGre", cAceGre},             {"cVxlanEncap", cVxlanEncap},     {"cOpenVpnEncap", cOpenVpnEncap},
          {"cUserspaceMiss", cUserspaceMiss}, {"budget", budget},             {"noiseRelStd", noiseRelStd}};
}

CostModel CostModel::fromJson(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "cost model must be an object", "/");
  CostModel m = calibrated();
  auto read = [&](const char* key, double& field) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number()) throw Error(ErrorCode::SchemaViolation, std::string(key) + " must be a number", std::string("/") + key);
    field = it->get<double>();
  };
  read("cOfcsLookup", m.cOfcsLookup);
  read("cIpForward", m.cIpForward);
  read("cMplsOp", m.cMplsOp);
  read("cAceGre", m.cAceGre);
  read("cVxlanEncap", m.cVxlanEncap);
  read("cOpenVpnEncap", m.cOpenVpnEncap);
  read("cUserspaceMiss", m.cUserspaceMiss);
  read("budget", m.budget);
  read("noiseRelStd", m.noiseRelStd);
  m.check();
  return m;
}

std::string_view toString(Tunneling t) {
  switch (t) {
    case Tunneling::None: return "none";
    case Tunneling::Vxlan: return "vxlan";
    case Tunneling::OpenVpn: return "openvpn";
  }
  return "";
}

Tunneling parseTunneling(std::string_view text) {
  for (auto t : {Tunneling::None, Tunneling::Vxlan, Tunneling::OpenVpn})
    if (toString(t) == text) return t;
  throw Error(ErrorCode::UnknownKind, "unknown tunneling " + std::string(text), std::string(text));
}

double tunnelCost(const CostModel& model, Tunneling t) {
  switch (t) {
    case Tunneling::None: return 0;
    case Tunneling::Vxlan: return model.cVxlanEncap;
    case Tunneling::OpenVpn: return model.cOpenVpnEncap;
  }
  return 0;
}

std::string_view toString(FlowCacheMode m) {
  switch (m) {
    case FlowCacheMode::None: return "none";
    case FlowCacheMode::Kernel: return "kernel";
    case FlowCacheMode::UserspaceOnly: return "userspace";
  }
  return "";
}

FlowCacheMode parseFlowCacheMode(std::string_view text) {
  for (auto m : {FlowCacheMode::None, FlowCacheMode::Kernel, FlowCacheMode::UserspaceOnly})
    if (toString(m) == text) return m;
  throw Error(ErrorCode::UnknownKind, "unknown flow cache mode " + std::string(text), std::string(text));
}

std::string_view toString(DropReason r) {
  switch (r) {
    case DropReason::NoRule: return "NO_RULE";
    case DropReason::NoSbpMatch: return "NO_SBP_MATCH";
    case DropReason::TtlExpired: return "TTL_EXPIRED";
    case DropReason::MplsTtlExpired: return "MPLS_TTL_EXPIRED";
    case DropReason::NoRoute: return "NO_ROUTE";
    case DropReason::NotIp: return "NOT_IP";
    case DropReason::UnknownVtep: return "UNKNOWN_VTEP";
    case DropReason::UnboundPort: return "UNBOUND_PORT";
    case DropReason::NotForHost: return "NOT_FOR_HOST";
    case DropReason::NoLink: return "NO_LINK";
    case DropReason::RuleDrop: return "RULE_DROP";
    case DropReason::LoopGuard: return "LOOP_GUARD";
    case DropReason::NotDelivered: return "NOT_DELIVERED";
  }
  return "";
}

}  // namespace oshi::netsim
