#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "oshi/topo/addr.hpp"

namespace oshi::netsim {

using topo::Ipv4Addr;
using topo::MacAddr;

inline constexpr std::uint16_t kEthIpv4 = 0x0800;
inline constexpr std::uint16_t kEthArp = 0x0806;
inline constexpr std::uint16_t kEthVlan = 0x8100;
inline constexpr std::uint16_t kEthMpls = 0x8847;
inline constexpr std::uint16_t kEthMplsMulticast = 0x8848;
inline constexpr std::uint16_t kEthLldp = 0x88CC;
inline constexpr std::uint16_t kEthBddp = 0x8942;
inline constexpr std::uint16_t kGreTransparentEthernet = 0x6558;

inline constexpr std::uint8_t kIpProtoGre = 47;
inline constexpr std::uint8_t kIpProtoUdp = 17;

inline constexpr std::uint32_t kMaxMplsLabel = (1u << 20) - 1;

inline bool isMplsEthertype(std::uint16_t t) { return t == kEthMpls || t == kEthMplsMulticast; }

struct MplsEntry {
  std::uint32_t label = 0;
  std::uint8_t tc = 0;
  bool bottomOfStack = true;
  std::uint8_t ttl = 255;

  bool operator==(const MplsEntry&) const = default;
};

struct IpHeader {
  Ipv4Addr src;
  Ipv4Addr dst;
  std::uint8_t proto = kIpProtoUdp;
  std::uint8_t ttl = 64;
  std::uint16_t totalLen = 20;

  bool operator==(const IpHeader&) const = default;
};

struct GreHeader {
  std::uint16_t protocolType = kGreTransparentEthernet;
  bool operator==(const GreHeader&) const = default;
};

struct UdpHeader {
  std::uint16_t srcPort = 0;
  std::uint16_t dstPort = 0;
  bool operator==(const UdpHeader&) const = default;
};

struct Frame;
using Bytes = std::vector<std::uint8_t>;

// Opaque bytes or a nested frame. Both alternatives are immutable and shared,
// so copying a Frame is cheap and still has value semantics.
class Payload {
 public:
  Payload() : data_(std::make_shared<const Bytes>()) {}
  explicit Payload(Bytes bytes) : data_(std::make_shared<const Bytes>(std::move(bytes))) {}
  explicit Payload(std::shared_ptr<const Bytes> bytes) : data_(std::move(bytes)) {}
  explicit Payload(Frame inner);

  bool isFrame() const { return std::holds_alternative<std::shared_ptr<const Frame>>(data_); }
  const Frame& frame() const { return *std::get<std::shared_ptr<const Frame>>(data_); }
  const Bytes& bytes() const { return *std::get<std::shared_ptr<const Bytes>>(data_); }
  std::size_t size() const;

  bool operator==(const Payload& other) const;

 private:
  std::variant<std::shared_ptr<const Bytes>, std::shared_ptr<const Frame>> data_;
};

// A layered packet. `ethertype` follows OpenFlow eth_type semantics: it names
// the header after the Ethernet header and any VLAN tags. The serializer
// emits one 0x8100 TPID per VLAN tag in front of it.
struct Frame {
  MacAddr ethSrc;
  MacAddr ethDst;
  std::uint16_t ethertype = kEthIpv4;
  std::vector<std::uint16_t> vlanTags;  // outermost first
  std::vector<MplsEntry> mplsStack;     // top first
  std::optional<IpHeader> ip;
  std::optional<GreHeader> gre;
  std::optional<UdpHeader> udp;
  Payload payload;
  // Simulator-side packet tag (not on the wire) used to attribute copies and
  // drops to the injecting flow.
  std::uint32_t flowTag = 0;

  std::size_t payloadSize() const { return payload.size(); }
  std::size_t wireSize() const {
    return 14 + 4 * vlanTags.size() + 4 * mplsStack.size() + (ip ? 20 : 0) + (gre ? 4 : 0) + (udp ? 8 : 0) +
           payloadSize();
  }

  // Recomputes ip.totalLen from the headers below it.
  void syncLengths();

  // Empty string when every structural invariant holds, otherwise a
  // description of the first violation.
  std::string invariantViolation() const;
  bool valid() const { return invariantViolation().empty(); }

  // On-wire bytes (no FCS, no padding). Size equals wireSize().
  Bytes serialize() const;
  void serializeInto(Bytes& out) const;

  bool operator==(const Frame&) const = default;
};

// Builders. All returned frames satisfy valid().
Frame makeEthernetFrame(MacAddr src, MacAddr dst, std::uint16_t ethertype, Bytes payload);
// Ethernet/IPv4/UDP frame padded with `fill` bytes to exactly `wireSize` bytes
// (minimum 42).
Frame makeUdpFrame(MacAddr src, MacAddr dst, Ipv4Addr ipSrc, Ipv4Addr ipDst, std::uint16_t srcPort,
                   std::uint16_t dstPort, std::size_t wireSize, std::shared_ptr<const Bytes> fill = nullptr);
Frame makeArpRequest(MacAddr senderMac, Ipv4Addr senderIp, Ipv4Addr targetIp);
Frame makeArpReply(MacAddr senderMac, Ipv4Addr senderIp, MacAddr targetMac, Ipv4Addr targetIp);

}  // namespace oshi::netsim
