#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oshi/topo/addr.hpp"

namespace oshi::topo {

enum class NodeKind { CoreRouter, ProviderEdge, CustomerEdge, Controller };

// `Control` links attach a controller to an OSHI node for in-band control
// traffic; they are not part of the data-plane graph.
enum class LinkKind { Core, Access, Control };

enum class ServiceKind { IpVll, Pw, Vss };

std::string_view toString(NodeKind kind);
std::string_view toString(LinkKind kind);
std::string_view toString(ServiceKind kind);
std::optional<NodeKind> parseNodeKind(std::string_view text);
std::optional<LinkKind> parseLinkKind(std::string_view text);
std::optional<ServiceKind> parseServiceKind(std::string_view text);

inline bool isOshi(NodeKind kind) {
  return kind == NodeKind::CoreRouter || kind == NodeKind::ProviderEdge;
}

struct NodeSpec {
  std::string id;
  NodeKind kind = NodeKind::CoreRouter;
  std::string label;
  std::optional<Ipv4Addr> loopback;
  std::map<std::string, MacAddr> interfaceMacs;

  bool operator==(const NodeSpec&) const = default;
};

struct PortRef {
  std::string node;
  std::string port;

  auto operator<=>(const PortRef&) const = default;
};

struct LinkSpec {
  std::string id;
  PortRef a;
  PortRef b;
  LinkKind kind = LinkKind::Core;
  int costMetric = 1;

  bool touches(std::string_view node) const { return a.node == node || b.node == node; }
  // Endpoint on the far side of `node`. Undefined if the link does not touch it.
  const PortRef& peerOf(std::string_view node) const { return a.node == node ? b : a; }
  const PortRef& endOf(std::string_view node) const { return a.node == node ? a : b; }

  bool operator==(const LinkSpec&) const = default;
};

struct AccessEndpoint {
  std::string pe;
  std::string port;
  std::optional<int> vlan;  // absent = untagged (port-based) classification

  // Name of the OFCS port that carries this endpoint's traffic: the physical
  // port, or the "port.vlan" sub-interface for tagged classification.
  std::string ofcsPort() const {
    return vlan ? port + "." + std::to_string(*vlan) : port;
  }

  auto operator<=>(const AccessEndpoint&) const = default;
};

struct ServiceSpec {
  std::string id;
  ServiceKind kind = ServiceKind::IpVll;
  std::vector<AccessEndpoint> endpoints;
  std::map<std::string, std::string> options;

  // PW/VSS customer namespace; defaults to the service id.
  std::string customer() const {
    auto it = options.find("customer");
    return it != options.end() ? it->second : id;
  }

  bool operator==(const ServiceSpec&) const = default;
};

struct TopologyModel {
  std::string modelName;
  std::vector<NodeSpec> nodes;
  std::vector<LinkSpec> links;
  std::map<std::string, std::string> controllerAssignment;  // OSHI node -> controller
  std::vector<ServiceSpec> services;
  // Unknown top-level document keys, carried through import/export untouched.
  nlohmann::json extensions = nlohmann::json::object();

  const NodeSpec* findNode(std::string_view id) const;
  const LinkSpec* findLink(std::string_view id) const;
  const ServiceSpec* findService(std::string_view id) const;
  // Link attached to (node, port), if any.
  const LinkSpec* linkAt(std::string_view node, std::string_view port) const;

  bool operator==(const TopologyModel&) const = default;
};

}  // namespace oshi::topo
