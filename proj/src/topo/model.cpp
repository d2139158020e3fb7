#include "oshi/topo/model.hpp"

#include <algorithm>

namespace oshi::topo {

std::string_view toString(NodeKind kind) {
  switch (kind) {
    case NodeKind::CoreRouter: return "CoreRouter";
    case NodeKind::ProviderEdge: return "ProviderEdge";
    case NodeKind::CustomerEdge: return "CustomerEdge";
    case NodeKind::Controller: return "Controller";
  }
  return "";
}

std::string_view toString(LinkKind kind) {
  switch (kind) {
    case LinkKind::Core: return "core";
    case LinkKind::Access: return "access";
    case LinkKind::Control: return "control";
  }
  return "";
}

std::string_view toString(ServiceKind kind) {
  switch (kind) {
    case ServiceKind::IpVll: return "IpVll";
    case ServiceKind::Pw: return "Pw";
    case ServiceKind::Vss: return "Vss";
  }
  return "";
}

std::optional<NodeKind> parseNodeKind(std::string_view text) {
  for (auto k : {NodeKind::CoreRouter, NodeKind::ProviderEdge, NodeKind::CustomerEdge, NodeKind::Controller})
    if (toString(k) == text) return k;
  return std::nullopt;
}

std::optional<LinkKind> parseLinkKind(std::string_view text) {
  for (auto k : {LinkKind::Core, LinkKind::Access, LinkKind::Control})
    if (toString(k) == text) return k;
  return std::nullopt;
}

std::optional<ServiceKind> parseServiceKind(std::string_view text) {
  for (auto k : {ServiceKind::IpVll, ServiceKind::Pw, ServiceKind::Vss})
    if (toString(k) == text) return k;
  return std::nullopt;
}

const NodeSpec* TopologyModel::findNode(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeSpec& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const LinkSpec* TopologyModel::findLink(std::string_view id) const {
  auto it = std::find_if(links.begin(), links.end(), [&](const LinkSpec& l) { return l.id == id; });
  return it == links.end() ? nullptr : &*it;
}

const ServiceSpec* TopologyModel::findService(std::string_view id) const {
  auto it = std::find_if(services.begin(), services.end(), [&](const ServiceSpec& s) { return s.id == id; });
  return it == services.end() ? nullptr : &*it;
}

const LinkSpec* TopologyModel::linkAt(std::string_view node, std::string_view port) const {
  for (const auto& l : links) {
    if ((l.a.node == node && l.a.port == port) || (l.b.node == node && l.b.port == port)) return &l;
  }
  return nullptr;
}

}  // namespace oshi::topo
