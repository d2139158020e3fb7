#include "oshi/service/api.hpp"

#include <filesystem>
#include <mutex>
#include <regex>

#include "oshi/deploy/plan.hpp"
#include "oshi/error.hpp"
#include "oshi/measure/experiment.hpp"
#include "oshi/netsim/node.hpp"
#include "oshi/topo/json_io.hpp"
#include "oshi/topo/validate.hpp"
#include "oshi/util/io.hpp"

namespace oshi::service {

using nlohmann::json;

json errorBody(const std::string& code, const std::string& message, const std::string& subject) {
  return {{"code", code}, {"message", message}, {"subject", subject}};
}

int statusFor(const std::string& code) {
  if (code == "SCHEMA_VIOLATION" || code == "INVALID_ARGUMENT" || code == "BAD_REQUEST") return 400;
  if (code == "FILE_NOT_FOUND" || code == "UNKNOWN_SERVICE" || code == "NOT_FOUND" || code == "NO_TOPOLOGY") return 404;
  if (code == "METHOD_NOT_ALLOWED") return 405;
  if (code == "UNPROVISIONED_TARGET" || code == "NO_SESSION") return 409;
  if (code == "INTERNAL") return 500;
  return 422;
}

namespace {

Response fail(const std::string& code, const std::string& message, const std::string& subject = {}) {
  return {statusFor(code), errorBody(code, message, subject)};
}

json countersJson(const netsim::CounterSet& c) {
  return {{"pkts", c.pkts}, {"bytes", c.bytes}, {"cost", c.cost}, {"maxPacketCost", c.maxPacketCost},
          {"dropped", c.dropped}, {"drops", c.drops}};
}

netsim::NetworkOptions networkOptions(const json& body) {
  netsim::NetworkOptions o;
  if (body.contains("costModel")) o.cost = netsim::CostModel::fromJson(body.at("costModel"));
  if (body.contains("tunneling")) o.tunneling = netsim::parseTunneling(body.at("tunneling").get<std::string>());
  if (body.contains("flowCache")) o.flowCache = netsim::parseFlowCacheMode(body.at("flowCache").get<std::string>());
  if (body.contains("routerMode")) o.routerMode = body.at("routerMode").get<bool>();
  o.cost.check();
  return o;
}

}  // namespace

ApiHandler::ApiHandler(std::string dataDir, std::optional<topo::TopologyModel> topology)
    : dataDir_(std::move(dataDir)), topology_(std::move(topology)) {}

Response ApiHandler::handle(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex teardownRe("^/api/teardown/([^/]+)$");
  static const std::regex resultsRe("^/api/results/([A-Za-z0-9_.-]+)$");
  try {
    auto parsed = [&]() -> json {
      if (body.empty()) return json::object();
      try {
        return json::parse(body);
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON body: ") + e.what(), "/");
      }
    };
    std::smatch m;
    auto route = [&](const char* allowed, auto&& fn) -> Response {
      if (method != allowed) return fail("METHOD_NOT_ALLOWED", method + " not allowed on " + path, path);
      return fn();
    };
    if (path == "/api/topology") {
      if (method == "GET") return getTopology();
      if (method == "PUT") return putTopology(parsed());
      return fail("METHOD_NOT_ALLOWED", method + " not allowed on " + path, path);
    }
    if (path == "/api/validate") return route("POST", [&] { return validate(parsed()); });
    if (path == "/api/provision") return route("POST", [&] { return provision(parsed()); });
    if (path == "/api/simulate") return route("POST", [&] { return simulate(parsed()); });
    if (path == "/api/counters") return route("GET", [&] { return counters(); });
    if (path == "/api/plan") return route("GET", [&] { return plan(); });
    if (std::regex_match(path, m, teardownRe)) return route("POST", [&] { return teardown(m[1].str()); });
    if (std::regex_match(path, m, resultsRe)) return route("GET", [&] { return results(m[1].str()); });
    return fail("NOT_FOUND", "no route " + path, path);
  } catch (const Error& e) {
    return fail(std::string(codeName(e.code())), e.what(), e.subject());
  } catch (const json::exception& e) {
    return fail("SCHEMA_VIOLATION", e.what(), "/");
  } catch (const std::exception& e) {
    return fail("INTERNAL", e.what());
  }
}

Response ApiHandler::requireTopology() const {
  return fail("NO_TOPOLOGY", "no topology loaded; PUT /api/topology first", "topology");
}

Response ApiHandler::getTopology() const {
  std::shared_lock lock(mu_);
  if (!topology_) return requireTopology();
  return {200, topo::exportJson(*topology_)};
}

Response ApiHandler::putTopology(const json& body) {
  auto model = topo::importJson(body);
  auto report = topo::validate(model);
  std::unique_lock lock(mu_);
  topology_ = std::move(model);
  session_.reset();
  lastResult_.reset();
  return {200, {{"stored", true}, {"validation", report.toJson()}}};
}

Response ApiHandler::validate(const json& body) const {
  return {200, topo::validate(topo::importJson(body)).toJson()};
}

void ApiHandler::startSession(const netsim::NetworkOptions& options) {
  auto report = topo::validate(*topology_);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::InvalidArgument, "hosted topology is invalid: " + v.code + " " + v.message, v.subject);
  }
  session_.reset();
  auto s = std::make_unique<ctrl::Session>(*topology_, options);
  s->provisionAll();
  session_ = std::move(s);
}

Response ApiHandler::provision(const json& body) {
  std::unique_lock lock(mu_);
  if (!topology_) return requireTopology();
  startSession(networkOptions(body));
  return {200, session_->controller().audit()};
}

Response ApiHandler::teardown(const std::string& serviceId) {
  std::unique_lock lock(mu_);
  if (!session_) return fail("NO_SESSION", "nothing is provisioned", serviceId);
  session_->controller().teardown(serviceId);
  return {200, session_->controller().audit()};
}

Response ApiHandler::simulate(const json& body) {
  if (!body.is_object()) throw Error(ErrorCode::SchemaViolation, "body must be an object", "/");
  const auto traffic = netsim::trafficFromJson(body.value("traffic", json::array()));
  netsim::ScenarioOptions so;
  so.seed = body.value("seed", std::uint64_t{0});
  so.sampleInterval = body.value("sampleInterval", 0.0);
  so.duration = body.value("duration", 0.0);
  const bool fresh = body.contains("costModel") || body.contains("tunneling") || body.contains("flowCache") ||
                     body.contains("routerMode");
  std::unique_lock lock(mu_);
  if (!topology_) return requireTopology();
  if (fresh || !session_) startSession(networkOptions(body));
  lastResult_ = netsim::runScenario(session_->network(), traffic, so);
  return {200, lastResult_->toJson()};
}

Response ApiHandler::counters() const {
  std::shared_lock lock(mu_);
  if (!session_) return fail("NO_SESSION", "no running session", "session");
  const auto& net = session_->network();
  json nodes = json::object();
  for (const auto& id : net.oshiIds()) nodes[id] = countersJson(net.oshi(id).counters);
  json hosts = json::object();
  for (const auto& id : net.hostIds()) hosts[id] = countersJson(net.host(id).counters);
  return {200, {{"nodes", nodes}, {"hosts", hosts}, {"lastSimulation", lastResult_ ? lastResult_->toJson() : json()}}};
}

Response ApiHandler::results(const std::string& experiment) const {
  namespace fs = std::filesystem;
  const auto base = fs::path(dataDir_);
  const auto stored = base / (experiment + ".results.json");
  if (fs::exists(stored)) {
    auto records = measure::importResultsJson(util::readJsonFile(stored.string()));
    return {200, json::parse(measure::exportResults(records, measure::ResultFormat::Json))};
  }
  const auto specFile = base / (experiment + ".experiment.json");
  if (!fs::exists(specFile)) return fail("FILE_NOT_FOUND", "no results or experiment named " + experiment, experiment);
  auto spec = measure::ExperimentSpec::fromJson(util::readJsonFile(specFile.string()));
  if (spec.name.empty()) spec.name = experiment;
  auto records = measure::runExperiment(spec, dataDir_);
  return {200, json::parse(measure::exportResults(records, measure::ResultFormat::Json))};
}

Response ApiHandler::plan() const {
  std::shared_lock lock(mu_);
  if (!topology_) return requireTopology();
  const auto file = std::filesystem::path(dataDir_) / "topology-to-testbed.json";
  deploy::ResourcePool pool;
  deploy::Mapping overrides;
  auto kind = deploy::TunnelKind::Vxlan;
  if (std::filesystem::exists(file)) {
    const auto doc = util::readJsonFile(file.string());
    pool = deploy::ResourcePool::fromJson(doc);
    if (doc.is_object() && doc.contains("overrides")) overrides = doc.at("overrides").get<deploy::Mapping>();
    if (doc.is_object() && doc.contains("tunnelKind")) kind = deploy::parseTunnelKind(doc.at("tunnelKind").get<std::string>());
  } else {
    pool = deploy::ResourcePool::synthetic(topology_->nodes.size());
  }
  return {200, deploy::buildPlan(*topology_, pool, overrides, kind).toJson()};
}

}  // namespace oshi::service
