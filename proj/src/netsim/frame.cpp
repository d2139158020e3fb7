#include "oshi/netsim/frame.hpp"

#include <algorithm>

#include "oshi/error.hpp"

namespace oshi::netsim {

Payload::Payload(Frame inner) : data_(std::make_shared<const Frame>(std::move(inner))) {}

std::size_t Payload::size() const { return isFrame() ? frame().wireSize() : bytes().size(); }

bool Payload::operator==(const Payload& other) const {
  if (isFrame() != other.isFrame()) return false;
  if (isFrame()) return data_ == other.data_ || frame() == other.frame();
  return data_ == other.data_ || bytes() == other.bytes();
}

void Frame::syncLengths() {
  if (ip) ip->totalLen = static_cast<std::uint16_t>(20 + (gre ? 4 : 0) + (udp ? 8 : 0) + payloadSize());
}

std::string Frame::invariantViolation() const {
  for (auto v : vlanTags)
    if (v > 4095) return "VLAN id exceeds 12 bits";
  for (std::size_t i = 0; i < mplsStack.size(); ++i) {
    if (mplsStack[i].label > kMaxMplsLabel) return "MPLS label exceeds 20 bits";
    if (mplsStack[i].tc > 7) return "MPLS TC exceeds 3 bits";
    if (mplsStack[i].bottomOfStack != (i + 1 == mplsStack.size())) return "bottom-of-stack bit misplaced";
  }
  if (!mplsStack.empty()) {
    if (!isMplsEthertype(ethertype)) return "MPLS stack present but ethertype is not MPLS";
  } else if (ip) {
    if (ethertype != kEthIpv4) return "IP header present but ethertype is not 0x0800";
  } else if (ethertype == kEthIpv4 || isMplsEthertype(ethertype) || ethertype == kEthVlan) {
    return "ethertype names a header that is not present";
  }
  if (gre && udp) return "GRE and UDP are mutually exclusive";
  if (gre && (!ip || ip->proto != kIpProtoGre)) return "GRE requires an IP header with protocol 47";
  if (udp && (!ip || ip->proto != kIpProtoUdp)) return "UDP requires an IP header with protocol 17";
  if (gre && gre->protocolType == kGreTransparentEthernet && !payload.isFrame())
    return "transparent-Ethernet GRE must carry a nested frame";
  if (ip && ip->totalLen != 20 + (gre ? 4 : 0) + (udp ? 8 : 0) + payloadSize()) return "IP totalLen mismatch";
  if (payload.isFrame()) {
    auto inner = payload.frame().invariantViolation();
    if (!inner.empty()) return "nested: " + inner;
  }
  return {};
}

namespace {

void put8(Bytes& out, std::uint8_t v) { out.push_back(v); }
void put16(Bytes& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}
void put32(Bytes& out, std::uint32_t v) {
  put16(out, static_cast<std::uint16_t>(v >> 16));
  put16(out, static_cast<std::uint16_t>(v));
}
void putMac(Bytes& out, MacAddr m) {
  for (int i = 0; i < 6; ++i) out.push_back(m.octet(i));
}

std::uint16_t ipChecksum(const std::uint8_t* hdr) {
  std::uint32_t sum = 0;
  for (int i = 0; i < 20; i += 2) sum += (std::uint32_t{hdr[i]} << 8) | hdr[i + 1];
  while (sum >> 16) sum = (sum & 0xffff) + (sum >> 16);
  return static_cast<std::uint16_t>(~sum);
}

}  // namespace

void Frame::serializeInto(Bytes& out) const {
  putMac(out, ethDst);
  putMac(out, ethSrc);
  for (auto tag : vlanTags) {
    put16(out, kEthVlan);
    put16(out, tag);
  }
  put16(out, ethertype);
  for (const auto& e : mplsStack) {
    put32(out, (e.label << 12) | (std::uint32_t{e.tc} << 9) | (e.bottomOfStack ? 0x100u : 0u) | e.ttl);
  }
  if (ip) {
    const std::size_t start = out.size();
    put8(out, 0x45);
    put8(out, 0);
    put16(out, ip->totalLen);
    put16(out, 0);
    put16(out, 0);
    put8(out, ip->ttl);
    put8(out, ip->proto);
    put16(out, 0);
    put32(out, ip->src.value);
    put32(out, ip->dst.value);
    const auto sum = ipChecksum(out.data() + start);
    out[start + 10] = static_cast<std::uint8_t>(sum >> 8);
    out[start + 11] = static_cast<std::uint8_t>(sum);
  }
  if (gre) {
    put16(out, 0);
    put16(out, gre->protocolType);
  }
  if (udp) {
    put16(out, udp->srcPort);
    put16(out, udp->dstPort);
    put16(out, static_cast<std::uint16_t>(8 + payloadSize()));
    put16(out, 0);
  }
  if (payload.isFrame()) {
    payload.frame().serializeInto(out);
  } else {
    const auto& b = payload.bytes();
    out.insert(out.end(), b.begin(), b.end());
  }
}

Bytes Frame::serialize() const {
  Bytes out;
  out.reserve(wireSize());
  serializeInto(out);
  return out;
}

Frame makeEthernetFrame(MacAddr src, MacAddr dst, std::uint16_t ethertype, Bytes payload) {
  Frame f;
  f.ethSrc = src;
  f.ethDst = dst;
  f.ethertype = ethertype;
  f.payload = Payload(std::move(payload));
  return f;
}

Frame makeUdpFrame(MacAddr src, MacAddr dst, Ipv4Addr ipSrc, Ipv4Addr ipDst, std::uint16_t srcPort,
                   std::uint16_t dstPort, std::size_t wireSize, std::shared_ptr<const Bytes> fill) {
  constexpr std::size_t kHeaders = 14 + 20 + 8;
  if (wireSize < kHeaders) throw Error(ErrorCode::InvalidArgument, "UDP frame must be at least 42 bytes");
  const std::size_t payloadLen = wireSize - kHeaders;
  Frame f;
  f.ethSrc = src;
  f.ethDst = dst;
  f.ethertype = kEthIpv4;
  f.ip = IpHeader{ipSrc, ipDst, kIpProtoUdp, 64, 0};
  f.udp = UdpHeader{srcPort, dstPort};
  if (fill && fill->size() == payloadLen) {
    f.payload = Payload(std::move(fill));
  } else {
    Bytes bytes(payloadLen);
    for (std::size_t i = 0; i < payloadLen; ++i)
      bytes[i] = fill && !fill->empty() ? (*fill)[i % fill->size()] : static_cast<std::uint8_t>(i);
    f.payload = Payload(std::move(bytes));
  }
  f.syncLengths();
  return f;
}

namespace {

Frame makeArp(std::uint16_t op, MacAddr sha, Ipv4Addr spa, MacAddr tha, Ipv4Addr tpa, MacAddr ethDst) {
  Bytes b;
  put16(b, 1);         // hardware type: Ethernet
  put16(b, kEthIpv4);  // protocol type
  put8(b, 6);
  put8(b, 4);
  put16(b, op);
  putMac(b, sha);
  put32(b, spa.value);
  putMac(b, tha);
  put32(b, tpa.value);
  return makeEthernetFrame(sha, ethDst, kEthArp, std::move(b));
}

}  // namespace

Frame makeArpRequest(MacAddr senderMac, Ipv4Addr senderIp, Ipv4Addr targetIp) {
  return makeArp(1, senderMac, senderIp, MacAddr{0}, targetIp, MacAddr::broadcast());
}

Frame makeArpReply(MacAddr senderMac, Ipv4Addr senderIp, MacAddr targetMac, Ipv4Addr targetIp) {
  return makeArp(2, senderMac, senderIp, targetMac, targetIp, targetMac);
}

}  // namespace oshi::netsim
