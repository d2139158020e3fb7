#include "oshi/ctrl/session.hpp"

namespace oshi::ctrl {

Session::Session(const topo::TopologyModel& model, netsim::NetworkOptions options)
    : net_(std::make_unique<netsim::Network>(model, options)), ctrl_(std::make_unique<Controller>(*net_)) {}

void Session::provisionAll() {
  for (const auto& s : net_->model().services) ctrl_->provision(s);
}

netsim::SimulationResult simulateTopology(const topo::TopologyModel& model,
                                          const std::vector<netsim::TrafficSpec>& traffic,
                                          const netsim::NetworkOptions& options,
                                          const netsim::ScenarioOptions& scenario) {
  Session session(model, options);
  session.provisionAll();
  return netsim::runScenario(session.network(), traffic, scenario);
}

}  // namespace oshi::ctrl
