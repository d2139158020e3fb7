#pragma once

#include <map>
#include <string>
#include <vector>

#include "oshi/topo/model.hpp"

namespace oshi::topo {

// Deterministic address plan derived from a model:
//   node index   1-based position in `nodes`
//   link index   1-based position of the link id in sorted order
//   loopback     10.0.0.<nodeIndex>/32 (explicit NodeSpec.loopback wins)
//   link prefix  10.1.<linkIndex>.0/30, a-side .1, b-side .2
//   MAC          02:00:<nodeIndex16>:<portIndex16> (explicit interfaceMacs win),
//                port index = 1-based rank of the port id among the node's ports
// Indices beyond 255 spill into the next octet up.
class Addressing {
 public:
  explicit Addressing(const TopologyModel& model);

  int nodeIndex(const std::string& node) const;
  int linkIndex(const std::string& link) const;
  int portIndex(const std::string& node, const std::string& port) const;

  Ipv4Addr loopback(const std::string& node) const;
  Ipv4Prefix linkPrefix(const std::string& link) const;
  Ipv4Addr interfaceAddress(const std::string& node, const std::string& port) const;
  MacAddr interfaceMac(const std::string& node, const std::string& port) const;

  // Physical ports of a node, sorted.
  const std::vector<std::string>& ports(const std::string& node) const;

  static MacAddr schemeMac(int nodeIndex, int portIndex);
  static Ipv4Addr schemeLoopback(int nodeIndex);
  static Ipv4Prefix schemeLinkPrefix(int linkIndex);

 private:
  const TopologyModel* model_;
  std::map<std::string, int> nodeIndex_;
  std::map<std::string, int> linkIndex_;
  std::map<std::string, std::vector<std::string>> ports_;
};

// Fills every missing interface MAC from the addressing scheme.
void assignMacs(TopologyModel& model);

}  // namespace oshi::topo
