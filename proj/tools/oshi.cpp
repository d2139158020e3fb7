#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "oshi/ctrl/session.hpp"
#include "oshi/deploy/plan.hpp"
#include "oshi/error.hpp"
#include "oshi/measure/experiment.hpp"
#include "oshi/netsim/scenario.hpp"
#include "oshi/service/api.hpp"
#include "oshi/topo/generate.hpp"
#include "oshi/topo/json_io.hpp"
#include "oshi/topo/validate.hpp"
#include "oshi/util/io.hpp"

namespace {

using nlohmann::json;
using namespace oshi;

enum Exit { kOk = 0, kViolations = 1, kUsage = 2, kNotFound = 3, kSchema = 4, kDomain = 5 };

struct Common {
  std::string topology;
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool seedSet = false;
};

topo::TopologyModel loadTopology(const std::string& path) { return topo::importJson(util::readJsonFile(path)); }

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) std::cout << text;
  else util::writeTextFile(c.out, text);
}

std::string dumpJson(const json& j) { return j.dump(2) + "\n"; }

int cmdValidate(const Common& c) {
  const auto report = topo::validate(loadTopology(c.topology));
  if (c.format == "text") {
    std::string text;
    for (const auto& v : report.violations) text += fmt::format("{}\t{}\t{}\n", v.code, v.subject, v.message);
    if (report.ok()) text = "ok\n";
    emit(c, text);
  } else {
    emit(c, dumpJson(report.toJson()));
  }
  for (const auto& v : report.violations) std::cerr << fmt::format("violation: {} {} {}\n", v.code, v.subject, v.message);
  return report.ok() ? kOk : kViolations;
}

struct GenerateParams {
  int core = 4;
  int pe = 3;
  int cePerPe = 1;
  double extraEdgeProb = 0.3;
};

int cmdGenerate(const Common& c, const GenerateParams& g) {
  emit(c, topo::dumpTopology(topo::generateRandom(g.core, g.pe, g.cePerPe, g.extraEdgeProb, c.seed)));
  return kOk;
}

int cmdProvision(const Common& c) {
  auto model = loadTopology(c.topology);
  if (c.seedSet)
    for (auto& s : model.services)
      if (s.kind == topo::ServiceKind::Vss && !s.options.count("seed")) s.options["seed"] = std::to_string(c.seed);
  ctrl::Session session(model);
  session.provisionAll();
  emit(c, dumpJson(session.controller().audit()));
  return kOk;
}

struct SimulateParams {
  std::string traffic;
  std::string costModel;
  std::string tunneling = "none";
  std::string flowCache = "none";
  bool routerMode = false;
  double sampleInterval = 0;
  double duration = 0;
};

int cmdSimulate(const Common& c, const SimulateParams& p) {
  const auto model = loadTopology(c.topology);
  const auto traffic = netsim::trafficFromJson(util::readJsonFile(p.traffic));
  netsim::NetworkOptions no;
  if (!p.costModel.empty()) no.cost = netsim::CostModel::fromJson(util::readJsonFile(p.costModel));
  no.cost.check();
  no.tunneling = netsim::parseTunneling(p.tunneling);
  no.flowCache = netsim::parseFlowCacheMode(p.flowCache);
  no.routerMode = p.routerMode;
  netsim::ScenarioOptions so{c.seed, p.sampleInterval, p.duration};
  const auto result = ctrl::simulateTopology(model, traffic, no, so);
  emit(c, c.format == "csv" ? result.toCsv() : dumpJson(result.toJson()));
  return kOk;
}

struct MeasureParams {
  std::string experiment;
  std::string preset;
  int runs = 0;
  double interval = 0;
  bool serial = false;
  bool list = false;
};

int cmdMeasure(const Common& c, const MeasureParams& p) {
  if (p.list) {
    for (const auto& n : measure::presetNames()) std::cout << n << "\n";
    return kOk;
  }
  if (p.experiment.empty() == p.preset.empty())
    throw CLI::ValidationError("measure", "exactly one of --experiment or --preset is required");
  measure::ExperimentSpec spec;
  std::string baseDir;
  if (!p.experiment.empty()) {
    spec = measure::ExperimentSpec::fromJson(util::readJsonFile(p.experiment));
    baseDir = std::filesystem::path(p.experiment).parent_path().string();
    if (spec.name.empty()) spec.name = std::filesystem::path(p.experiment).stem().stem().string();
  } else {
    spec = measure::preset(p.preset);
  }
  if (p.runs > 0) spec.runs = p.runs;
  if (p.interval > 0) spec.sampleIntervalSec = p.interval;
  if (c.seedSet) spec.seed = c.seed;
  if (!c.topology.empty()) spec.topologyRef = std::filesystem::absolute(c.topology).string();
  const auto records = p.serial ? measure::runExperimentSerial(spec, baseDir) : measure::runExperiment(spec, baseDir);
  emit(c, measure::exportResults(records, measure::parseResultFormat(c.format)));
  return kOk;
}

struct DeployParams {
  std::string resources;
  std::vector<std::string> overrides;
  std::string tunnelKind = "vxlan";
};

int cmdDeployPlan(const Common& c, const DeployParams& p) {
  const auto model = loadTopology(c.topology);
  const auto poolDoc = util::readJsonFile(p.resources);
  const auto pool = deploy::ResourcePool::fromJson(poolDoc);
  deploy::Mapping overrides;
  if (poolDoc.is_object() && poolDoc.contains("overrides")) overrides = poolDoc.at("overrides").get<deploy::Mapping>();
  for (const auto& o : p.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == o.size())
      throw CLI::ValidationError("--override", "expected node=vm, got " + o);
    overrides[o.substr(0, eq)] = o.substr(eq + 1);
  }
  emit(c, dumpJson(deploy::buildPlan(model, pool, overrides, deploy::parseTunnelKind(p.tunnelKind)).toJson()));
  return kOk;
}

service::HttpServer* gServer = nullptr;

int cmdServe(const Common& c, const std::string& addr, int port, const std::string& dir) {
  std::optional<topo::TopologyModel> model;
  if (!c.topology.empty()) model = loadTopology(c.topology);
  else if (std::filesystem::exists(std::filesystem::path(dir) / "topology.json"))
    model = loadTopology((std::filesystem::path(dir) / "topology.json").string());
  service::ApiHandler handler(dir, std::move(model));
  service::HttpServer server(handler);
  const int bound = server.bind(addr, port);
  if (bound < 0) throw Error(ErrorCode::InvalidArgument, fmt::format("cannot bind {}:{}", addr, port), addr);
  std::cerr << fmt::format("listening on {}:{}\n", addr, bound);
  gServer = &server;
  std::signal(SIGINT, [](int) { if (gServer) gServer->stop(); });
  std::signal(SIGTERM, [](int) { if (gServer) gServer->stop(); });
  server.listen();
  gServer = nullptr;
  return kOk;
}

int exitFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return kNotFound;
    case ErrorCode::SchemaViolation: return kSchema;
    default: return kDomain;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"OSHI hybrid IP/SDN network simulator and toolchain"};
  app.require_subcommand(1);
  Common c;
  auto common = [&](CLI::App* sub, bool topology, bool topologyRequired) {
    if (topology) {
      auto* opt = sub->add_option("--topology", c.topology, "Topology JSON file");
      if (topologyRequired) opt->required();
    }
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t s) { c.seed = s; c.seedSet = true; }, "Random seed");
  };

  auto* validate = app.add_subcommand("validate", "Check a topology; exit 1 on violations");
  common(validate, true, true);

  GenerateParams gp;
  auto* generate = app.add_subcommand("generate", "Write a seeded random topology");
  common(generate, false, false);
  generate->add_option("--core", gp.core, "Core routers")->check(CLI::PositiveNumber);
  generate->add_option("--pe", gp.pe, "Provider edges")->check(CLI::PositiveNumber);
  generate->add_option("--ce-per-pe", gp.cePerPe, "Customer edges per PE")->check(CLI::NonNegativeNumber);
  generate->add_option("--extra-edge-prob", gp.extraEdgeProb, "Probability of each extra core edge")->check(CLI::Range(0.0, 1.0));

  auto* provision = app.add_subcommand("provision", "Provision all services; write the audit");
  common(provision, true, true);

  SimulateParams sp;
  auto* simulate = app.add_subcommand("simulate", "Run a traffic scenario");
  common(simulate, true, true);
  simulate->add_option("--traffic", sp.traffic, "Traffic JSON file")->required();
  simulate->add_option("--cost-model", sp.costModel, "Cost model JSON file");
  simulate->add_option("--tunneling", sp.tunneling, "none | vxlan | openvpn");
  simulate->add_option("--flow-cache", sp.flowCache, "none | kernel | userspace");
  simulate->add_flag("--router-mode", sp.routerMode, "Plain IP routers instead of OSHI nodes");
  simulate->add_option("--sample-interval", sp.sampleInterval, "CPU sample interval in seconds");
  simulate->add_option("--duration", sp.duration, "Simulated seconds");

  MeasureParams mp;
  auto* measureCmd = app.add_subcommand("measure", "Run an experiment; write the records");
  common(measureCmd, true, false);
  measureCmd->add_option("--experiment", mp.experiment, "Experiment JSON file");
  measureCmd->add_option("--preset", mp.preset, "Named preset (see --list-presets)");
  measureCmd->add_option("--runs", mp.runs, "Override the number of runs")->check(CLI::PositiveNumber);
  measureCmd->add_option("--interval", mp.interval, "Override the sample interval (s)")->check(CLI::PositiveNumber);
  measureCmd->add_flag("--serial", mp.serial, "Use the serial runner");
  measureCmd->add_flag("--list-presets", mp.list, "List preset names");

  DeployParams dp;
  auto* deployCmd = app.add_subcommand("deploy-plan", "Map nodes to VMs, plan the overlay, emit configs");
  common(deployCmd, true, true);
  deployCmd->add_option("--resources", dp.resources, "VM pool JSON file")->required();
  deployCmd->add_option("--override", dp.overrides, "Pin node=vm (repeatable)");
  deployCmd->add_option("--tunnel-kind", dp.tunnelKind, "vxlan | userspace");

  std::string addr = "127.0.0.1";
  int port = 8080;
  std::string dir = ".";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  common(serve, true, false);
  serve->add_option("--addr", addr, "Listen address");
  serve->add_option("--port", port, "Listen port (0 = any)")->check(CLI::Range(0, 65535));
  serve->add_option("--topology-dir", dir, "Directory with topology.json, results and testbed mapping");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmdValidate(c);
    if (*generate) return cmdGenerate(c, gp);
    if (*provision) return cmdProvision(c);
    if (*simulate) return cmdSimulate(c, sp);
    if (*measureCmd) return cmdMeasure(c, mp);
    if (*deployCmd) return cmdDeployPlan(c, dp);
    if (*serve) return cmdServe(c, addr, port, dir);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << fmt::format("error: {}: {}{}\n", codeName(e.code()), e.what(),
                             e.subject().empty() ? "" : " (" + e.subject() + ")");
    return exitFor(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: SCHEMA_VIOLATION: " << e.what() << "\n";
    return kSchema;
  }
  return kUsage;
}
