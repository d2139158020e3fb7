#include "oshi/netsim/network.hpp"

#include <algorithm>
#include <deque>

#include "oshi/error.hpp"

namespace oshi::netsim {

std::size_t PacketTrace::receivedBy(const std::string& host) const {
  return static_cast<std::size_t>(
      std::count_if(receptions.begin(), receptions.end(), [&](const Reception& r) { return r.host == host; }));
}

enum class Stage { LinkRx, Ofcs, Ip, Ace, Vbp, Originate };

struct Network::Event {
  Stage stage;
  std::string node;
  PortId port;
  Frame frame;
};

Network::Network(topo::TopologyModel model, NetworkOptions options)
    : model_(std::move(model)), options_(options) {
  init(computeFibs(model_));
}

Network::Network(topo::TopologyModel model, FibMap fibs, NetworkOptions options)
    : model_(std::move(model)), options_(options) {
  init(std::move(fibs));
}

void Network::init(FibMap fibs) {
  options_.cost.check();
  addr_ = std::make_unique<topo::Addressing>(model_);
  for (std::size_t i = 0; i < model_.links.size(); ++i) {
    const auto& l = model_.links[i];
    cabling_[{l.a.node, l.a.port}] = {i, l.b};
    cabling_[{l.b.node, l.b.port}] = {i, l.a};
  }
  for (const auto& n : model_.nodes) {
    if (topo::isOshi(n.kind)) {
      OshiNodeState s;
      s.nodeId = n.id;
      s.role = n.kind;
      s.loopback = addr_->loopback(n.id);
      s.physicalPorts = addr_->ports(n.id);
      for (const auto& p : s.physicalPorts) s.interfaces[p] = {addr_->interfaceAddress(n.id, p), addr_->interfaceMac(n.id, p)};
      s.pairAllPorts();
      if (!options_.routerMode) bootstrapTables(s, n.kind, options_.vllMulticastRule);
      oshi_.emplace(n.id, std::move(s));
      oshiOrder_.push_back(n.id);
    } else {
      HostState h;
      h.id = n.id;
      h.kind = n.kind;
      const auto& ports = addr_->ports(n.id);
      if (!ports.empty()) {
        h.port = ports.front();
        auto [idx, peer] = cabling_.at({n.id, h.port});
        h.linkId = model_.links[idx].id;
        h.address = addr_->interfaceAddress(n.id, h.port);
        h.mac = addr_->interfaceMac(n.id, h.port);
        h.gatewayNode = peer.node;
        h.gateway = addr_->interfaceAddress(peer.node, peer.port);
        h.gatewayMac = addr_->interfaceMac(peer.node, peer.port);
      }
      hosts_.emplace(n.id, std::move(h));
      hostOrder_.push_back(n.id);
    }
  }
  setFibs(fibs);
}

void Network::setFibs(const FibMap& fibs) {
  for (auto& [id, s] : oshi_) {
    auto it = fibs.find(id);
    s.fib = it == fibs.end() ? Fib{} : it->second;
  }
}

OshiNodeState& Network::oshi(const std::string& id) {
  auto it = oshi_.find(id);
  if (it == oshi_.end()) throw Error(ErrorCode::InvalidArgument, "not an OSHI node: " + id, id);
  return it->second;
}

const OshiNodeState& Network::oshi(const std::string& id) const {
  return const_cast<Network*>(this)->oshi(id);
}

HostState& Network::host(const std::string& id) {
  auto it = hosts_.find(id);
  if (it == hosts_.end()) throw Error(ErrorCode::InvalidArgument, "not a host: " + id, id);
  return it->second;
}

const HostState& Network::host(const std::string& id) const { return const_cast<Network*>(this)->host(id); }

const topo::PortRef* Network::peerOf(const std::string& node, const PortId& port) const {
  auto it = cabling_.find({node, port});
  return it == cabling_.end() ? nullptr : &it->second.second;
}

const topo::LinkSpec* Network::linkAt(const std::string& node, const PortId& port) const {
  auto it = cabling_.find({node, port});
  return it == cabling_.end() ? nullptr : &model_.links[it->second.first];
}

void Network::addSubinterface(const std::string& node, const PortId& port, std::uint16_t vlan) {
  oshi(node).subinterfaces[port + "." + std::to_string(vlan)] = {port, vlan};
}

void Network::removeSubinterface(const std::string& node, const PortId& port, std::uint16_t vlan) {
  oshi(node).subinterfaces.erase(port + "." + std::to_string(vlan));
}

void Network::markProvisioned(const std::string& serviceId, bool provisioned) {
  if (provisioned)
    provisioned_.insert(serviceId);
  else
    provisioned_.erase(serviceId);
}

void Network::resetCounters() {
  for (auto& [id, s] : oshi_) {
    s.counters = {};
    s.table0.clearCounters();
    s.table1.clearCounters();
    s.flowCache.clear();
  }
  for (auto& [id, h] : hosts_) h.counters = {};
}

Frame Network::hostUdpFrame(const std::string& src, const std::string& dst, std::size_t wireSize, bool sameSegment,
                            std::uint16_t srcPort, std::uint16_t dstPort, std::shared_ptr<const Bytes> fill) const {
  const auto& s = host(src);
  const auto& d = host(dst);
  return makeUdpFrame(s.mac, sameSegment ? d.mac : s.gatewayMac, s.address, d.address, srcPort, dstPort, wireSize,
                      std::move(fill));
}

void Network::charge(const std::string& node, double cost, PacketTrace& trace) {
  if (cost == 0) return;
  trace.nodeCost[node] += cost;
  auto it = oshi_.find(node);
  if (it != oshi_.end()) it->second.counters.cost += cost;
}

void Network::recordDrop(const std::string& node, const PortId& port, DropReason r, const Frame& f,
                         PacketTrace& trace) {
  trace.drops.push_back({node, port, r, f.flowTag});
  if (auto it = oshi_.find(node); it != oshi_.end())
    it->second.counters.drop(r);
  else if (auto h = hosts_.find(node); h != hosts_.end())
    h->second.counters.drop(r);
}

void Network::transmit(const std::string& node, const PortId& port, Frame frame, PacketTrace& trace,
                       std::vector<Event>& queue) {
  PortId phys = port;
  if (auto it = oshi_.find(node); it != oshi_.end()) {
    auto sub = it->second.subinterfaces.find(port);
    if (sub != it->second.subinterfaces.end()) {
      phys = sub->second.first;
      frame.vlanTags.insert(frame.vlanTags.begin(), sub->second.second);
    }
    charge(node, tunnelCost(options_.cost, options_.tunneling), trace);
  }
  auto cab = cabling_.find({node, phys});
  if (cab == cabling_.end()) {
    recordDrop(node, port, DropReason::NoLink, frame, trace);
    return;
  }
  const auto& peer = cab->second.second;
  if (options_.recordTransmissions)
    trace.transmissions.push_back({model_.links[cab->second.first].id, {node, phys}, peer, frame});
  queue.push_back({Stage::LinkRx, peer.node, peer.port, std::move(frame)});
}

namespace {

// "ace:<customer>:<port>" -> (customer, port); "acevtep:<customer>" -> (customer, "")
std::pair<std::string, std::string> splitAcePort(const PortId& p) {
  if (p.rfind("acevtep:", 0) == 0) return {p.substr(8), ""};
  auto rest = p.substr(4);
  auto colon = rest.rfind(':');
  return {rest.substr(0, colon), rest.substr(colon + 1)};
}

}  // namespace

void Network::run(std::vector<Event>& initial, PacketTrace& trace) {
  std::deque<Event> queue(std::make_move_iterator(initial.begin()), std::make_move_iterator(initial.end()));
  std::vector<Event> produced;
  const auto& cost = options_.cost;

  while (!queue.empty()) {
    if (++trace.events > options_.loopGuard) {
      const auto& e = queue.front();
      recordDrop(e.node, e.port, DropReason::LoopGuard, e.frame, trace);
      break;
    }
    Event ev = std::move(queue.front());
    queue.pop_front();
    produced.clear();

    if (auto h = hosts_.find(ev.node); h != hosts_.end()) {
      auto& host = h->second;
      ++host.counters.pkts;
      host.counters.bytes += ev.frame.wireSize();
      if (ev.frame.ethDst == host.mac || ev.frame.ethDst.isMulticast())
        trace.receptions.push_back({host.id, ev.port, std::move(ev.frame)});
      else
        recordDrop(host.id, ev.port, DropReason::NotForHost, ev.frame, trace);
      continue;
    }

    auto& node = oshi(ev.node);
    switch (ev.stage) {
      case Stage::LinkRx: {
        ++node.counters.pkts;
        node.counters.bytes += ev.frame.wireSize();
        charge(node.nodeId, tunnelCost(cost, options_.tunneling), trace);
        if (options_.routerMode) {
          if (options_.tunneling != Tunneling::None) charge(node.nodeId, 2 * cost.cOfcsLookup, trace);
          produced.push_back({Stage::Ip, ev.node, ev.port, std::move(ev.frame)});
          break;
        }
        PortId in = ev.port;
        if (!ev.frame.vlanTags.empty()) {
          if (auto sub = node.subinterfaceFor(ev.port, ev.frame.vlanTags.front())) {
            in = *sub;
            ev.frame.vlanTags.erase(ev.frame.vlanTags.begin());
          }
        }
        produced.push_back({Stage::Ofcs, ev.node, std::move(in), std::move(ev.frame)});
        break;
      }
      case Stage::Ofcs: {
        OfcsResult r = ofcsProcess(node, ev.port, ev.frame, cost);
        double c = r.cost;
        if (options_.flowCache != FlowCacheMode::None)
          c = flowCacheCharge(node, options_.flowCache, flowKey(ev.port, ev.frame), r.cost, cost);
        charge(node.nodeId, c, trace);
        for (auto& out : r.outputs) {
          switch (out.destination) {
            case Destination::Port:
              transmit(node.nodeId, out.port, std::move(out.frame), trace, produced);
              break;
            case Destination::Controller:
              trace.packetIns.push_back({node.nodeId, out.port, std::move(out.frame)});
              break;
            case Destination::IpEngine:
              produced.push_back({Stage::Ip, ev.node, out.port, std::move(out.frame)});
              break;
            case Destination::Ace:
              produced.push_back({Stage::Ace, ev.node, out.port, std::move(out.frame)});
              break;
            case Destination::Vbp:
              produced.push_back({Stage::Vbp, ev.node, out.port, std::move(out.frame)});
              break;
            case Destination::Drop:
              recordDrop(node.nodeId, out.port, out.reason, out.frame, trace);
              break;
          }
        }
        break;
      }
      case Stage::Originate:
      case Stage::Ip: {
        IpResult r = ipForward(node, ev.frame, cost);
        charge(node.nodeId, r.cost, trace);
        if (r.kind == IpResult::Kind::Local) {
          trace.localDeliveries.push_back({node.nodeId, std::move(r.frame)});
        } else if (r.kind == IpResult::Kind::Drop) {
          recordDrop(node.nodeId, ev.port, r.reason, r.frame, trace);
        } else if (options_.routerMode) {
          transmit(node.nodeId, r.outPort, std::move(r.frame), trace, produced);
        } else {
          produced.push_back({Stage::Ofcs, ev.node, internalPort(r.outPort), std::move(r.frame)});
        }
        break;
      }
      case Stage::Ace: {
        auto [customer, local] = splitAcePort(ev.port);
        auto ace = node.aces.find(customer);
        if (ace == node.aces.end()) {
          recordDrop(node.nodeId, ev.port, DropReason::UnboundPort, ev.frame, trace);
          break;
        }
        try {
          if (local.empty()) {
            auto [port, inner] = aceDecap(ace->second, ev.frame);
            charge(node.nodeId, cost.cAceGre, trace);
            produced.push_back({Stage::Ofcs, ev.node, aceLocalPort(customer, port), std::move(inner)});
          } else {
            Frame gre = aceEncap(ace->second, local, ev.frame);
            charge(node.nodeId, cost.cAceGre, trace);
            produced.push_back({Stage::Ofcs, ev.node, aceVtepPort(customer), std::move(gre)});
          }
        } catch (const Error& e) {
          recordDrop(node.nodeId, ev.port,
                     e.code() == ErrorCode::UnboundPort ? DropReason::UnboundPort : DropReason::UnknownVtep, ev.frame,
                     trace);
        }
        break;
      }
      case Stage::Vbp: {
        auto vbp = node.vbps.find(ev.port.substr(4));
        if (vbp == node.vbps.end()) {
          recordDrop(node.nodeId, ev.port, DropReason::UnboundPort, ev.frame, trace);
          break;
        }
        try {
          auto [remote, inner] = greDecap(vbp->second.grePort, ev.frame);
          charge(node.nodeId, cost.cAceGre, trace);
          for (auto& [port, f] : vbpForward(vbp->second, remote.str(), inner)) {
            Frame gre = greEncap(vbp->second.grePort, *Ipv4Addr::parse(port), f);
            charge(node.nodeId, cost.cAceGre, trace);
            produced.push_back({Stage::Ofcs, ev.node, ev.port, std::move(gre)});
          }
        } catch (const Error&) {
          recordDrop(node.nodeId, ev.port, DropReason::UnknownVtep, ev.frame, trace);
        }
        break;
      }
    }
    for (auto& p : produced) queue.push_back(std::move(p));
  }
  finishPacket(trace);
}

void Network::finishPacket(const PacketTrace& trace) {
  for (const auto& [node, c] : trace.nodeCost) {
    auto it = oshi_.find(node);
    if (it != oshi_.end()) it->second.counters.maxPacketCost = std::max(it->second.counters.maxPacketCost, c);
  }
}

PacketTrace Network::sendFromHost(const std::string& hostId, const Frame& frame) {
  const auto& h = host(hostId);
  PacketTrace trace;
  std::vector<Event> q;
  if (h.port.empty()) {
    recordDrop(hostId, "", DropReason::NoLink, frame, trace);
    return trace;
  }
  transmit(hostId, h.port, frame, trace, q);
  run(q, trace);
  return trace;
}

PacketTrace Network::receiveAt(const std::string& node, const PortId& port, const Frame& frame) {
  PacketTrace trace;
  std::vector<Event> q{{Stage::LinkRx, node, port, frame}};
  run(q, trace);
  return trace;
}

PacketTrace Network::packetOut(const std::string& node, const PortId& port, const Frame& frame) {
  PacketTrace trace;
  std::vector<Event> q;
  transmit(node, port, frame, trace, q);
  run(q, trace);
  return trace;
}

PacketTrace Network::originate(const std::string& node, const Frame& ipFrame) {
  PacketTrace trace;
  if (hasHost(node)) return sendFromHost(node, ipFrame);
  std::vector<Event> q{{Stage::Originate, node, "local", ipFrame}};
  run(q, trace);
  return trace;
}

}  // namespace oshi::netsim
