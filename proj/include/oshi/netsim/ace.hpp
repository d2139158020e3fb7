#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "oshi/netsim/flow.hpp"
#include "oshi/netsim/frame.hpp"

namespace oshi::netsim {

// IP endpoint of keyless GRE tunnels, with its static neighbor table.
struct GrePort {
  Ipv4Addr vtepIp;
  MacAddr mac;
  std::map<Ipv4Addr, MacAddr> staticArp;

  bool operator==(const GrePort&) const = default;
};

struct PwBinding {
  Ipv4Addr remoteVtep;
  std::string sessionId;  // owning service id

  bool operator==(const PwBinding&) const = default;
};

// Per-customer access encapsulator on a PE.
struct AceState {
  std::string customerId;
  std::vector<PortId> localPorts;  // customer-facing OFCS ports (endpoint ofcsPort)
  GrePort grePort;
  std::map<PortId, PwBinding> pwBindings;

  bool operator==(const AceState&) const = default;
};

// OFCS port names connecting the ACE / VBP to the switch.
std::string aceLocalPort(const std::string& customer, const PortId& endpointPort);
std::string aceVtepPort(const std::string& customer);
std::string vbpPort(const std::string& vssId);

// Ethernet(local VTEP MAC -> neighbor MAC, 0x0800) / IP(proto 47) / GRE(0x6558) / inner.
// Throws Error{UnknownVtep} when `remote` has no static ARP entry.
Frame greEncap(const GrePort& port, Ipv4Addr remote, const Frame& inner);
// Returns (remote VTEP, inner frame). Throws Error{UnknownVtep} when the frame
// is not a GRE packet addressed to this port.
std::pair<Ipv4Addr, Frame> greDecap(const GrePort& port, const Frame& outer);

// Throws Error{UnboundPort} or Error{UnknownVtep}.
Frame aceEncap(const AceState& ace, const PortId& localPort, const Frame& customerFrame);
// Throws Error{UnknownVtep} when the source VTEP is not bound to a local port.
std::pair<PortId, Frame> aceDecap(const AceState& ace, const Frame& greFrame);

// Learning bridge with remote ports only. Remote ports are named by the
// remote VTEP address ("10.253.1.4").
struct VbpState {
  std::string vssId;
  std::string customerId;
  GrePort grePort;
  std::vector<PortId> remotePorts;
  std::map<MacAddr, PortId> macTable;

  bool operator==(const VbpState&) const = default;
};

std::vector<std::pair<PortId, Frame>> vbpForward(VbpState& vbp, const PortId& inPort, const Frame& frame);

}  // namespace oshi::netsim
