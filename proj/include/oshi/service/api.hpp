#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>

#include <json.hpp>

#include "oshi/ctrl/session.hpp"
#include "oshi/netsim/scenario.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::service {

struct Response {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent implementation of the HTTP API. Thread-safe: reads
// share a lock, mutations take it exclusively.
//
//   GET  /api/topology            hosted topology
//   PUT  /api/topology            replace it (drops the running session)
//   POST /api/validate            validation report for the body topology
//   POST /api/provision           provision every hosted service
//   POST /api/teardown/{id}       tear one service down
//   POST /api/simulate            run traffic, see simulate()
//   GET  /api/counters            per-node counters of the session
//   GET  /api/results/{name}      <dataDir>/<name>.results.json, or the
//                                 records of <dataDir>/<name>.experiment.json
//   GET  /api/plan                deployment plan on <dataDir>/topology-to-testbed.json
//
// Errors are {code, message, subject}.
class ApiHandler {
 public:
  explicit ApiHandler(std::string dataDir = ".", std::optional<topo::TopologyModel> topology = std::nullopt);

  Response handle(const std::string& method, const std::string& path, const std::string& body);

  Response getTopology() const;
  Response putTopology(const nlohmann::json& body);
  Response validate(const nlohmann::json& body) const;
  Response provision(const nlohmann::json& body);
  Response teardown(const std::string& serviceId);
  // Body: {traffic, seed, sampleInterval, duration, costModel, tunneling,
  // flowCache, routerMode}. Network options, or no session yet, start a
  // fresh session with all services provisioned; otherwise the current
  // session is reused as is.
  Response simulate(const nlohmann::json& body);
  Response counters() const;
  Response results(const std::string& experiment) const;
  Response plan() const;

 private:
  Response requireTopology() const;
  void startSession(const netsim::NetworkOptions& options);

  std::string dataDir_;
  mutable std::shared_mutex mu_;
  std::optional<topo::TopologyModel> topology_;
  std::unique_ptr<ctrl::Session> session_;
  std::optional<netsim::SimulationResult> lastResult_;
};

nlohmann::json errorBody(const std::string& code, const std::string& message, const std::string& subject = {});
// HTTP status for a domain error code.
int statusFor(const std::string& code);

// Blocks serving on addr:port until stop() is called from another thread.
class HttpServer {
 public:
  explicit HttpServer(ApiHandler& handler);
  ~HttpServer();

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& addr, int port);
  void listen();  // blocking, after bind()
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace oshi::service
