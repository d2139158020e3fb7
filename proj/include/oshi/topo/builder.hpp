#pragma once

#include <map>
#include <optional>
#include <string>

#include "oshi/topo/model.hpp"

namespace oshi::topo {

// Incremental construction with automatic port names (eth0, eth1, ... per
// node) and link ids (l1, l2, ...).
class TopologyBuilder {
 public:
  explicit TopologyBuilder(std::string modelName = "model");

  TopologyBuilder& node(const std::string& id, NodeKind kind);
  TopologyBuilder& cr(const std::string& id) { return node(id, NodeKind::CoreRouter); }
  TopologyBuilder& pe(const std::string& id) { return node(id, NodeKind::ProviderEdge); }
  TopologyBuilder& ce(const std::string& id) { return node(id, NodeKind::CustomerEdge); }
  TopologyBuilder& controller(const std::string& id) { return node(id, NodeKind::Controller); }

  // Link kind inferred from the endpoint kinds. Returns the new link id.
  std::string link(const std::string& a, const std::string& b, int costMetric = 1);
  // Port used by `node` on the link towards `peer` (first match).
  std::string portTowards(const std::string& node, const std::string& peer) const;

  // Access endpoint of the PE facing `ce`.
  AccessEndpoint endpointFor(const std::string& ce, std::optional<int> vlan = std::nullopt) const;
  TopologyBuilder& service(const std::string& id, ServiceKind kind, std::vector<AccessEndpoint> endpoints,
                           std::map<std::string, std::string> options = {});

  // Assigns every OSHI node to the first controller and fills MACs.
  TopologyModel build() const;

 private:
  TopologyModel m_;
  std::map<std::string, int> nextPort_;
};

// Reference scenario topologies, each with controller "ctl1" attached to pe1.
//   pair:  ce1 - pe1 - pe2 - ce2
//   chain: ce1 - pe1 - cr1 - pe2 - ce2
TopologyModel builtinPair();
TopologyModel builtinChain();

}  // namespace oshi::topo
