#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "oshi/netsim/cost.hpp"
#include "oshi/netsim/fib.hpp"
#include "oshi/netsim/frame.hpp"
#include "oshi/netsim/node.hpp"
#include "oshi/topo/addressing.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::netsim {

struct NetworkOptions {
  CostModel cost = CostModel::calibrated();
  Tunneling tunneling = Tunneling::None;
  FlowCacheMode flowCache = FlowCacheMode::None;
  // Plain IP routers instead of OSHI nodes: no OFCS, frames go straight to
  // the IP engine.
  bool routerMode = false;
  bool vllMulticastRule = true;
  bool recordTransmissions = false;
  std::size_t loopGuard = 10000;  // events per injected packet
};

// CE or controller: a single-homed end system with a static gateway.
struct HostState {
  std::string id;
  topo::NodeKind kind = topo::NodeKind::CustomerEdge;
  PortId port;
  std::string linkId;
  Ipv4Addr address;
  MacAddr mac;
  std::string gatewayNode;
  Ipv4Addr gateway;
  MacAddr gatewayMac;
  CounterSet counters;
};

struct Reception {
  std::string host;
  PortId port;
  Frame frame;
};

struct DropRecord {
  std::string node;
  PortId port;
  DropReason reason = DropReason::NoRule;
  std::uint32_t flowTag = 0;
};

struct PacketIn {
  std::string node;
  PortId inPort;
  Frame frame;
};

struct LocalDelivery {
  std::string node;
  Frame frame;
};

struct Transmission {
  std::string linkId;
  topo::PortRef from;
  topo::PortRef to;
  Frame frame;
};

// Everything that happened while one injected frame was processed to
// quiescence.
struct PacketTrace {
  std::vector<Reception> receptions;
  std::vector<DropRecord> drops;
  std::vector<PacketIn> packetIns;
  std::vector<LocalDelivery> localDeliveries;
  std::vector<Transmission> transmissions;  // only with recordTransmissions
  std::map<std::string, double> nodeCost;
  std::size_t events = 0;

  std::size_t receivedBy(const std::string& host) const;
};

class Network {
 public:
  explicit Network(topo::TopologyModel model, NetworkOptions options = {});
  // Uses the given FIBs instead of computing them (e.g. for partitioned cores).
  Network(topo::TopologyModel model, FibMap fibs, NetworkOptions options);
  // Internal pointers into the model: neither copyable nor movable.
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const topo::TopologyModel& model() const { return model_; }
  const topo::Addressing& addressing() const { return *addr_; }
  const NetworkOptions& options() const { return options_; }
  NetworkOptions& options() { return options_; }

  bool hasOshi(const std::string& id) const { return oshi_.count(id) != 0; }
  bool hasHost(const std::string& id) const { return hosts_.count(id) != 0; }
  OshiNodeState& oshi(const std::string& id);
  const OshiNodeState& oshi(const std::string& id) const;
  HostState& host(const std::string& id);
  const HostState& host(const std::string& id) const;
  // OSHI node ids in model order.
  const std::vector<std::string>& oshiIds() const { return oshiOrder_; }
  const std::vector<std::string>& hostIds() const { return hostOrder_; }

  // Peer (node, port) of a link end, if the port is cabled.
  const topo::PortRef* peerOf(const std::string& node, const PortId& port) const;
  const topo::LinkSpec* linkAt(const std::string& node, const PortId& port) const;

  // A host transmits on its only link.
  PacketTrace sendFromHost(const std::string& host, const Frame& frame);
  // The frame arrives at (node, port) as if received from the cable.
  PacketTrace receiveAt(const std::string& node, const PortId& port, const Frame& frame);
  // Controller packet-out: the node transmits the frame on a physical port.
  PacketTrace packetOut(const std::string& node, const PortId& port, const Frame& frame);
  // A packet originated by the node's own IP stack (e.g. control traffic).
  PacketTrace originate(const std::string& node, const Frame& ipFrame);

  // UDP frame between two hosts. `sameSegment`: addressed to the peer's MAC
  // (layer-2 services) instead of the gateway.
  Frame hostUdpFrame(const std::string& src, const std::string& dst, std::size_t wireSize, bool sameSegment,
                     std::uint16_t srcPort = 5001, std::uint16_t dstPort = 5001,
                     std::shared_ptr<const Bytes> fill = nullptr) const;

  void addSubinterface(const std::string& node, const PortId& port, std::uint16_t vlan);
  void removeSubinterface(const std::string& node, const PortId& port, std::uint16_t vlan);

  // Service ids that traffic may target (maintained by the controller).
  void markProvisioned(const std::string& serviceId, bool provisioned);
  bool isProvisioned(const std::string& serviceId) const { return provisioned_.count(serviceId) != 0; }

  void setFibs(const FibMap& fibs);
  // Node counters, rule counters and flow caches.
  void resetCounters();

 private:
  struct Event;
  void init(FibMap fibs);
  void run(std::vector<Event>& initial, PacketTrace& trace);
  void transmit(const std::string& node, const PortId& port, Frame frame, PacketTrace& trace,
                std::vector<Event>& queue);
  void charge(const std::string& node, double cost, PacketTrace& trace);
  void recordDrop(const std::string& node, const PortId& port, DropReason r, const Frame& f, PacketTrace& trace);
  void finishPacket(const PacketTrace& trace);

  topo::TopologyModel model_;
  NetworkOptions options_;
  std::unique_ptr<topo::Addressing> addr_;
  std::map<std::string, OshiNodeState> oshi_;
  std::map<std::string, HostState> hosts_;
  std::vector<std::string> oshiOrder_;
  std::vector<std::string> hostOrder_;
  std::map<std::pair<std::string, std::string>, std::pair<std::size_t, topo::PortRef>> cabling_;  // -> (link index, peer)
  std::set<std::string> provisioned_;
};

}  // namespace oshi::netsim
