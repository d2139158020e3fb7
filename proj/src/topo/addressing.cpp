#include "oshi/topo/addressing.hpp"

#include <algorithm>

#include "oshi/error.hpp"

namespace oshi::topo {

Addressing::Addressing(const TopologyModel& model) : model_(&model) {
  for (std::size_t i = 0; i < model.nodes.size(); ++i) nodeIndex_.emplace(model.nodes[i].id, static_cast<int>(i) + 1);

  std::vector<std::string> linkIds;
  for (const auto& l : model.links) linkIds.push_back(l.id);
  std::sort(linkIds.begin(), linkIds.end());
  for (std::size_t i = 0; i < linkIds.size(); ++i) linkIndex_.emplace(linkIds[i], static_cast<int>(i) + 1);

  for (const auto& l : model.links) {
    ports_[l.a.node].push_back(l.a.port);
    ports_[l.b.node].push_back(l.b.port);
  }
  for (auto& [node, ports] : ports_) {
    std::sort(ports.begin(), ports.end());
    ports.erase(std::unique(ports.begin(), ports.end()), ports.end());
  }
}

int Addressing::nodeIndex(const std::string& node) const {
  auto it = nodeIndex_.find(node);
  if (it == nodeIndex_.end()) throw Error(ErrorCode::InvalidArgument, "unknown node", node);
  return it->second;
}

int Addressing::linkIndex(const std::string& link) const {
  auto it = linkIndex_.find(link);
  if (it == linkIndex_.end()) throw Error(ErrorCode::InvalidArgument, "unknown link", link);
  return it->second;
}

int Addressing::portIndex(const std::string& node, const std::string& port) const {
  const auto& list = ports(node);
  auto it = std::lower_bound(list.begin(), list.end(), port);
  if (it == list.end() || *it != port) throw Error(ErrorCode::InvalidArgument, "unknown port " + port, node);
  return static_cast<int>(it - list.begin()) + 1;
}

const std::vector<std::string>& Addressing::ports(const std::string& node) const {
  static const std::vector<std::string> kNone;
  auto it = ports_.find(node);
  return it == ports_.end() ? kNone : it->second;
}

MacAddr Addressing::schemeMac(int nodeIndex, int portIndex) {
  return MacAddr{(0x0200ULL << 32) | (static_cast<std::uint64_t>(nodeIndex & 0xffff) << 16) |
                 static_cast<std::uint64_t>(portIndex & 0xffff)};
}

Ipv4Addr Addressing::schemeLoopback(int nodeIndex) {
  return Ipv4Addr{(10u << 24) | static_cast<std::uint32_t>(nodeIndex & 0xffff)};
}

Ipv4Prefix Addressing::schemeLinkPrefix(int linkIndex) {
  // 10.1.<i>.0/30 for i < 256; larger indices continue in 10.2.x.0, ...
  const auto hi = static_cast<std::uint32_t>(1 + linkIndex / 256);
  const auto lo = static_cast<std::uint32_t>(linkIndex % 256);
  return Ipv4Prefix{Ipv4Addr{(10u << 24) | (hi << 16) | (lo << 8)}, 30};
}

Ipv4Addr Addressing::loopback(const std::string& node) const {
  const NodeSpec* spec = model_->findNode(node);
  if (spec && spec->loopback) return *spec->loopback;
  return schemeLoopback(nodeIndex(node));
}

Ipv4Prefix Addressing::linkPrefix(const std::string& link) const { return schemeLinkPrefix(linkIndex(link)); }

Ipv4Addr Addressing::interfaceAddress(const std::string& node, const std::string& port) const {
  const LinkSpec* link = model_->linkAt(node, port);
  if (!link) throw Error(ErrorCode::InvalidArgument, "port " + port + " has no link", node);
  const auto prefix = linkPrefix(link->id);
  const bool aSide = link->a.node == node && link->a.port == port;
  return Ipv4Addr{prefix.network.value + (aSide ? 1u : 2u)};
}

MacAddr Addressing::interfaceMac(const std::string& node, const std::string& port) const {
  const NodeSpec* spec = model_->findNode(node);
  if (spec) {
    auto it = spec->interfaceMacs.find(port);
    if (it != spec->interfaceMacs.end()) return it->second;
  }
  return schemeMac(nodeIndex(node), portIndex(node, port));
}

void assignMacs(TopologyModel& model) {
  const Addressing addressing(model);
  std::vector<std::pair<std::size_t, std::pair<std::string, MacAddr>>> fills;
  for (std::size_t i = 0; i < model.nodes.size(); ++i) {
    const auto& node = model.nodes[i];
    for (const auto& port : addressing.ports(node.id)) {
      if (!node.interfaceMacs.count(port))
        fills.push_back({i, {port, Addressing::schemeMac(static_cast<int>(i) + 1, addressing.portIndex(node.id, port))}});
    }
  }
  for (auto& [i, entry] : fills) model.nodes[i].interfaceMacs.insert(entry);
}

}  // namespace oshi::topo
