#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oshi/ctrl/graph.hpp"
#include "oshi/ctrl/labels.hpp"
#include "oshi/ctrl/steiner.hpp"
#include "oshi/netsim/network.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::ctrl {

using netsim::RuleId;

enum class Direction { Forward, Reverse };

struct SbpRecord {
  std::string sbpId;
  std::string serviceId;
  Direction direction = Direction::Forward;
  SbpPath path;
  std::map<std::string, std::uint32_t> labels;  // link id -> label
  std::vector<std::pair<std::string, RuleId>> installedRules;

  nlohmann::json toJson() const;
};

// Tunnel endpoint: an ACE or VBP on a node.
struct VtepRef {
  std::string node;
  PortId ofcsPort;  // "acevtep:<c>" or "vbp:<vss>"
  netsim::Ipv4Addr ip;
  netsim::MacAddr mac;
};

struct PwRecord {
  std::string pwId;
  VtepRef a;
  VtepRef b;
  SbpRecord forward;
  SbpRecord reverse;
};

struct VssInstance {
  std::string vssId;
  VssMode mode = VssMode::Optimized;
  std::set<std::string> branchingPoints;
  SteinerTree tree;
  std::vector<std::string> pws;

  nlohmann::json toJson() const;
};

struct ServiceRecord {
  topo::ServiceSpec spec;
  std::vector<SbpRecord> sbps;
  std::vector<PwRecord> pws;
  std::optional<VssInstance> vss;
  // Rules outside any SBP (access steering, local cross-connects).
  std::vector<std::pair<std::string, RuleId>> accessRules;
  std::vector<std::tuple<std::string, PortId, std::uint16_t>> subinterfaces;
  // (node, customer, ace local port) bindings made by this service.
  std::vector<std::tuple<std::string, std::string, PortId>> aceBindings;
  std::vector<std::pair<std::string, std::string>> vbps;  // (node, vss id)
  std::vector<std::pair<std::string, std::string>> claims;  // (pe, ofcs port)

  nlohmann::json toJson() const;
};

// ACE VTEP 10.254.<customer>.<node>, VBP VTEP 10.253.<customer>.<node>.
netsim::Ipv4Addr aceVtepIp(int customerIndex, int nodeIndex);
netsim::Ipv4Addr vbpVtepIp(int customerIndex, int nodeIndex);
netsim::MacAddr aceVtepMac(int customerIndex, int nodeIndex);
netsim::MacAddr vbpVtepMac(int customerIndex, int nodeIndex);

// Logically centralized controller bound to one network instance. Not
// thread-safe; callers serialize mutations.
class Controller {
 public:
  explicit Controller(netsim::Network& net);

  netsim::Network& network() { return net_; }
  const netsim::Network& network() const { return net_; }
  const DiscoveredGraph& graph() const { return graph_; }
  void rediscover();

  // Dispatches on the service kind. VSS mode and seed come from the options
  // "vssMode" (default optimized) and "seed" (default 0).
  const ServiceRecord& provision(const topo::ServiceSpec& spec);
  std::pair<SbpRecord, SbpRecord> provisionVll(const topo::ServiceSpec& spec);
  PwRecord provisionPw(const topo::ServiceSpec& spec);
  VssInstance provisionVss(const topo::ServiceSpec& spec, VssMode mode, std::uint64_t seed);
  // Throws Error{UnknownService}.
  void teardown(const std::string& serviceId);

  const std::map<std::string, ServiceRecord>& services() const { return services_; }
  const LabelAllocator& labels() const { return labels_; }
  // 1-based rank of the customer among all PW/VSS customers of the topology.
  int customerIndex(const std::string& customer) const;

  nlohmann::json audit() const;

 private:
  ServiceRecord& begin(const topo::ServiceSpec& spec, topo::ServiceKind kind, std::size_t minEndpoints,
                       std::size_t maxEndpoints);
  void rollback(const std::string& serviceId);
  void claim(ServiceRecord& rec, const topo::AccessEndpoint& ep);
  RuleId install(std::vector<std::pair<std::string, RuleId>>& sink, const std::string& node, int table, int priority,
                 netsim::Match match, std::vector<netsim::Action> actions, const std::string& owner);
  std::uint32_t allocate(SbpRecord& sbp, const std::string& linkId, const std::string& receiver);
  // Per-link labels along a core path; fills the SBP path and labels.
  std::vector<std::uint32_t> labelPath(SbpRecord& sbp, const std::string& from, const std::string& to);
  SbpRecord tunnel(ServiceRecord& rec, const std::string& sbpId, Direction dir, const VtepRef& src, const VtepRef& dst);
  PwRecord connectPw(ServiceRecord& rec, const std::string& pwId, const VtepRef& a, const VtepRef& b);
  VtepRef bindAce(ServiceRecord& rec, const topo::AccessEndpoint& ep, const std::string& customer);
  VtepRef ensureVbp(ServiceRecord& rec, const std::string& node, const std::string& vssId, const std::string& customer);
  void attachRemote(const VtepRef& local, const VtepRef& remote, const std::string& customer,
                    const std::string& serviceId, const PortId& localPort);
  void releaseSbp(const SbpRecord& sbp);

  netsim::Network& net_;
  DiscoveredGraph graph_;
  LabelAllocator labels_;
  std::map<std::string, ServiceRecord> services_;
  std::map<std::pair<std::string, std::string>, std::string> claims_;  // (pe, ofcs port) -> service
  std::map<std::string, int> customers_;
};

}  // namespace oshi::ctrl
