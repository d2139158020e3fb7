#pragma once

#include <memory>
#include <vector>

#include <json.hpp>

#include "oshi/ctrl/controller.hpp"
#include "oshi/netsim/network.hpp"
#include "oshi/netsim/scenario.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::ctrl {

// A network instance together with its controller.
class Session {
 public:
  explicit Session(const topo::TopologyModel& model, netsim::NetworkOptions options = {});

  netsim::Network& network() { return *net_; }
  const netsim::Network& network() const { return *net_; }
  Controller& controller() { return *ctrl_; }
  const Controller& controller() const { return *ctrl_; }

  // Provisions every service of the model, in model order.
  void provisionAll();

 private:
  std::unique_ptr<netsim::Network> net_;
  std::unique_ptr<Controller> ctrl_;
};

// Builds a session, provisions all topology services and runs the traffic.
netsim::SimulationResult simulateTopology(const topo::TopologyModel& model,
                                          const std::vector<netsim::TrafficSpec>& traffic,
                                          const netsim::NetworkOptions& options,
                                          const netsim::ScenarioOptions& scenario);

}  // namespace oshi::ctrl
