#include "oshi/netsim/ace.hpp"

#include <algorithm>

#include "oshi/error.hpp"

namespace oshi::netsim {

std::string aceLocalPort(const std::string& customer, const PortId& endpointPort) {
  return "ace:" + customer + ":" + endpointPort;
}

std::string aceVtepPort(const std::string& customer) { return "acevtep:" + customer; }

std::string vbpPort(const std::string& vssId) { return "vbp:" + vssId; }

Frame greEncap(const GrePort& port, Ipv4Addr remote, const Frame& inner) {
  auto arp = port.staticArp.find(remote);
  if (arp == port.staticArp.end())
    throw Error(ErrorCode::UnknownVtep, "no static ARP entry for " + remote.str(), remote.str());
  Frame out;
  out.ethSrc = port.mac;
  out.ethDst = arp->second;
  out.ethertype = kEthIpv4;
  out.ip = IpHeader{port.vtepIp, remote, kIpProtoGre, 64, 0};
  out.gre = GreHeader{};
  out.payload = Payload(inner);
  out.flowTag = inner.flowTag;
  out.syncLengths();
  return out;
}

std::pair<Ipv4Addr, Frame> greDecap(const GrePort& port, const Frame& outer) {
  if (!outer.ip || !outer.gre || !outer.payload.isFrame() || outer.ip->proto != kIpProtoGre ||
      outer.gre->protocolType != kGreTransparentEthernet)
    throw Error(ErrorCode::UnknownVtep, "not a GRE transparent-Ethernet packet");
  if (outer.ip->dst != port.vtepIp)
    throw Error(ErrorCode::UnknownVtep, "GRE packet for " + outer.ip->dst.str() + " reached " + port.vtepIp.str(),
                outer.ip->dst.str());
  return {outer.ip->src, outer.payload.frame()};
}

Frame aceEncap(const AceState& ace, const PortId& localPort, const Frame& customerFrame) {
  auto it = ace.pwBindings.find(localPort);
  if (it == ace.pwBindings.end())
    throw Error(ErrorCode::UnboundPort, "ACE port " + localPort + " has no pseudowire", localPort);
  return greEncap(ace.grePort, it->second.remoteVtep, customerFrame);
}

std::pair<PortId, Frame> aceDecap(const AceState& ace, const Frame& greFrame) {
  auto [remote, inner] = greDecap(ace.grePort, greFrame);
  for (const auto& [port, binding] : ace.pwBindings)
    if (binding.remoteVtep == remote) return {port, std::move(inner)};
  throw Error(ErrorCode::UnknownVtep, "no pseudowire from " + remote.str(), remote.str());
}

std::vector<std::pair<PortId, Frame>> vbpForward(VbpState& vbp, const PortId& inPort, const Frame& frame) {
  std::vector<std::pair<PortId, Frame>> out;
  if (std::find(vbp.remotePorts.begin(), vbp.remotePorts.end(), inPort) == vbp.remotePorts.end()) return out;
  if (!frame.ethSrc.isMulticast()) vbp.macTable[frame.ethSrc] = inPort;
  if (!frame.ethDst.isMulticast()) {
    auto known = vbp.macTable.find(frame.ethDst);
    if (known != vbp.macTable.end()) {
      if (known->second != inPort) out.emplace_back(known->second, frame);
      return out;
    }
  }
  for (const auto& p : vbp.remotePorts)
    if (p != inPort) out.emplace_back(p, frame);
  return out;
}

}  // namespace oshi::netsim
