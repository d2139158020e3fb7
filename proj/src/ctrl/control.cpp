#include "oshi/ctrl/control.hpp"

namespace oshi::ctrl {

nlohmann::json ControlReport::toJson() const {
  auto list = [](const auto& pairs) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& [n, c] : pairs) j.push_back({{"node", n}, {"controller", c}});
    return j;
  };
  return {{"ok", ok()}, {"reachable", list(reachable)}, {"unreachable", list(unreachable)}};
}

ControlReport verifyControlConnectivity(netsim::Network& net) {
  ControlReport report;
  const auto& model = net.model();
  for (const auto& id : net.oshiIds()) {
    auto it = model.controllerAssignment.find(id);
    const std::string controller = it == model.controllerAssignment.end() ? "" : it->second;
    bool ok = false;
    if (net.hasHost(controller) && !net.host(controller).port.empty()) {
      const auto& node = net.oshi(id);
      const auto& ctl = net.host(controller);
      auto frame = netsim::makeUdpFrame(netsim::MacAddr{}, netsim::MacAddr{}, node.loopback, ctl.address, 6633, 6633, 128);
      auto trace = net.originate(id, frame);
      ok = trace.receivedBy(controller) > 0;
    }
    (ok ? report.reachable : report.unreachable).emplace_back(id, controller);
  }
  return report;
}

ControlReport verifyControlConnectivity(const topo::TopologyModel& model, const netsim::FibMap& fibs) {
  netsim::Network net(model, fibs, netsim::NetworkOptions{});
  return verifyControlConnectivity(net);
}

}  // namespace oshi::ctrl
