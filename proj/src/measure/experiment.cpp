#include "oshi/measure/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "oshi/ctrl/session.hpp"
#include "oshi/error.hpp"
#include "oshi/netsim/scenario.hpp"
#include "oshi/topo/builder.hpp"
#include "oshi/topo/json_io.hpp"
#include "oshi/util/io.hpp"
#include "oshi/util/rng.hpp"

namespace oshi::measure {

using nlohmann::json;

std::string_view toString(Mode m) {
  switch (m) {
    case Mode::RouterIp: return "routerIp";
    case Mode::OshiIp: return "oshiIp";
    case Mode::OshiVll: return "oshiVll";
    case Mode::OshiPw: return "oshiPw";
  }
  return "";
}

Mode parseMode(std::string_view text) {
  for (auto m : {Mode::RouterIp, Mode::OshiIp, Mode::OshiVll, Mode::OshiPw})
    if (toString(m) == text) return m;
  throw Error(ErrorCode::InvalidArgument, "unknown mode " + std::string(text), std::string(text));
}

void ExperimentSpec::check() const {
  auto bad = [](const std::string& what, const std::string& subject) {
    throw Error(ErrorCode::InvalidArgument, what, subject);
  };
  if (samplesPerRun < 1) bad("samplesPerRun must be >= 1", "samplesPerRun");
  if (discardPrefix < 0 || discardPrefix >= samplesPerRun) bad("discardPrefix must be in [0, samplesPerRun)", "discardPrefix");
  if (runs < 1) bad("runs must be >= 1", "runs");
  if (!(sampleIntervalSec >= 0.001)) bad("sampleIntervalSec must be >= 0.001", "sampleIntervalSec");
  if (rates.empty()) bad("no rates", "rates");
  for (double r : rates)
    if (!(r > 0) || !std::isfinite(r)) bad("rates must be positive", "rates");
  if (pktBytes < 64) bad("pktBytes must be >= 64", "pktBytes");
  if (srcCe == dstCe) bad("srcCe and dstCe must differ", "dstCe");
  if (costModel) costModel->check();
}

json ExperimentSpec::toJson() const {
  json j{{"name", name},
         {"topologyRef", topologyRef},
         {"mode", toString(mode)},
         {"tunneling", netsim::toString(tunneling)},
         {"flowCache", netsim::toString(flowCache)},
         {"rates", rates},
         {"pktBytes", pktBytes},
         {"samplesPerRun", samplesPerRun},
         {"discardPrefix", discardPrefix},
         {"runs", runs},
         {"seed", seed},
         {"sampleIntervalSec", sampleIntervalSec},
         {"srcCe", srcCe},
         {"dstCe", dstCe},
         {"monitoredNodes", monitoredNodes}};
  if (costModel) j["costModel"] = costModel->toJson();
  return j;
}

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::SchemaViolation, std::string("bad type for ") + key, std::string("/") + key);
  }
}

}  // namespace

ExperimentSpec ExperimentSpec::fromJson(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaViolation, "experiment must be an object", "/");
  ExperimentSpec s;
  s.name = field<std::string>(j, "name", s.name);
  s.topologyRef = field<std::string>(j, "topologyRef", s.topologyRef);
  try {
    s.mode = parseMode(field<std::string>(j, "mode", std::string(toString(s.mode))));
    s.tunneling = netsim::parseTunneling(field<std::string>(j, "tunneling", std::string(netsim::toString(s.tunneling))));
    s.flowCache = netsim::parseFlowCacheMode(field<std::string>(j, "flowCache", std::string(netsim::toString(s.flowCache))));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SchemaViolation) throw;
    throw Error(ErrorCode::SchemaViolation, e.what(), "/" + e.subject());
  }
  s.rates = field<std::vector<double>>(j, "rates", s.rates);
  s.pktBytes = field<std::size_t>(j, "pktBytes", s.pktBytes);
  s.samplesPerRun = field<int>(j, "samplesPerRun", s.samplesPerRun);
  s.discardPrefix = field<int>(j, "discardPrefix", s.discardPrefix);
  s.runs = field<int>(j, "runs", s.runs);
  s.seed = field<std::uint64_t>(j, "seed", s.seed);
  s.sampleIntervalSec = field<double>(j, "sampleIntervalSec", s.sampleIntervalSec);
  s.srcCe = field<std::string>(j, "srcCe", s.srcCe);
  s.dstCe = field<std::string>(j, "dstCe", s.dstCe);
  s.monitoredNodes = field<std::vector<std::string>>(j, "monitoredNodes", s.monitoredNodes);
  if (j.contains("costModel")) {
    if (!j.at("costModel").is_object()) throw Error(ErrorCode::SchemaViolation, "costModel must be an object", "/costModel");
    s.costModel = netsim::CostModel::fromJson(j.at("costModel"));
  }
  s.check();
  return s;
}

double sampleStatistic(const std::vector<double>& samples, std::size_t discardPrefix) {
  if (samples.size() <= discardPrefix)
    throw Error(ErrorCode::TooFewSamples,
                fmt::format("{} samples, {} discarded", samples.size(), discardPrefix));
  double sum = 0;
  for (std::size_t i = discardPrefix; i < samples.size(); ++i) sum += samples[i];
  return sum / static_cast<double>(samples.size() - discardPrefix);
}

Summary summarize(const std::vector<double>& values) {
  // Welford: identical inputs give that exact mean and zero spread.
  double mean = 0, m2 = 0;
  std::size_t k = 0;
  for (double x : values) {
    ++k;
    const double d = x - mean;
    mean += d / static_cast<double>(k);
    m2 += d * (x - mean);
  }
  Summary s{mean, 0};
  if (k > 1) s.ci95 = 1.96 * std::sqrt(std::max(0.0, m2 / static_cast<double>(k - 1))) / std::sqrt(static_cast<double>(k));
  return s;
}

topo::TopologyModel resolveTopology(const std::string& ref, const std::string& baseDir) {
  if (ref == "builtin:pair") return topo::builtinPair();
  if (ref == "builtin:chain") return topo::builtinChain();
  std::filesystem::path p(ref);
  if (p.is_relative() && !baseDir.empty()) p = std::filesystem::path(baseDir) / p;
  return topo::importJson(util::readJsonFile(p.string()));
}

namespace {

topo::AccessEndpoint accessOf(const topo::TopologyModel& model, const std::string& ce) {
  const auto* n = model.findNode(ce);
  if (!n || n->kind != topo::NodeKind::CustomerEdge) throw Error(ErrorCode::InvalidArgument, "unknown CE " + ce, ce);
  for (const auto& l : model.links)
    if (l.kind == topo::LinkKind::Access && l.touches(ce)) {
      const auto& pe = l.peerOf(ce);
      return {pe.node, pe.port, std::nullopt};
    }
  throw Error(ErrorCode::InvalidArgument, "CE " + ce + " has no access link", ce);
}

}  // namespace

std::vector<std::string> monitoredNodes(const ExperimentSpec& spec, const topo::TopologyModel& model) {
  if (!spec.monitoredNodes.empty()) {
    for (const auto& id : spec.monitoredNodes) {
      const auto* n = model.findNode(id);
      if (!n || !topo::isOshi(n->kind)) throw Error(ErrorCode::InvalidArgument, "cannot monitor " + id, id);
    }
    return spec.monitoredNodes;
  }
  std::vector<std::string> out{accessOf(model, spec.srcCe).pe};
  for (const auto& n : model.nodes)
    if (n.kind == topo::NodeKind::CoreRouter) {
      out.push_back(n.id);
      break;
    }
  return out;
}

namespace {

struct Prepared {
  topo::TopologyModel model;
  std::vector<std::string> nodes;
  netsim::NetworkOptions options;
  topo::ServiceSpec service;  // empty id for the IP modes; else the model's only service
};

Prepared prepare(const ExperimentSpec& spec, const std::string& baseDir) {
  spec.check();
  Prepared p;
  p.model = resolveTopology(spec.topologyRef, baseDir);
  p.nodes = monitoredNodes(spec, p.model);
  p.options.cost = spec.costModel ? *spec.costModel : netsim::CostModel::calibrated();
  p.options.tunneling = spec.tunneling;
  p.options.flowCache = spec.flowCache;
  p.options.routerMode = spec.mode == Mode::RouterIp;
  if (spec.mode == Mode::OshiVll || spec.mode == Mode::OshiPw) {
    p.service.id = spec.mode == Mode::OshiVll ? "exp-vll" : "exp-pw";
    p.service.kind = spec.mode == Mode::OshiVll ? topo::ServiceKind::IpVll : topo::ServiceKind::Pw;
    p.service.endpoints = {accessOf(p.model, spec.srcCe), accessOf(p.model, spec.dstCe)};
    p.model.services = {p.service};
  } else {
    accessOf(p.model, spec.srcCe);
    accessOf(p.model, spec.dstCe);
  }
  return p;
}

netsim::SimulationResult simulate(const Prepared& p, const ExperimentSpec& spec, double rate, double duration,
                                  double interval, std::uint64_t seed) {
  ctrl::Session session(p.model, p.options);
  if (!p.service.id.empty()) session.controller().provision(p.service);
  netsim::TrafficSpec t;
  t.id = "f1";
  t.srcCe = spec.srcCe;
  t.dstCe = spec.dstCe;
  t.service = p.service.id;
  t.rate = rate;
  t.pktBytes = spec.pktBytes;
  t.duration = duration;
  netsim::ScenarioOptions so;
  so.seed = seed;
  so.sampleInterval = interval;
  so.duration = duration;
  return netsim::runScenario(session.network(), {t}, so);
}

// perRunMeans for one (rate, run), one entry per monitored node.
std::vector<double> runOnce(const Prepared& p, const ExperimentSpec& spec, std::size_t rateIdx, int run) {
  const std::uint64_t seed = util::mixSeed(util::mixSeed(spec.seed, rateIdx), static_cast<std::uint64_t>(run));
  const auto res = simulate(p, spec, spec.rates[rateIdx], spec.samplesPerRun * spec.sampleIntervalSec,
                            spec.sampleIntervalSec, seed);
  const double rsd = p.options.cost.noiseRelStd;
  util::DetRng rng(seed);
  std::vector<double> out;
  for (const auto& id : p.nodes) {
    auto samples = res.node(id)->samples;
    if (rsd > 0)
      for (auto& s : samples) s *= std::max(0.0, 1.0 + rsd * rng.normal());
    out.push_back(sampleStatistic(samples, static_cast<std::size_t>(spec.discardPrefix)));
  }
  return out;
}

std::vector<MeasurementRecord> assemble(const ExperimentSpec& spec, const Prepared& p,
                                        const std::vector<std::vector<double>>& perTask) {
  std::vector<MeasurementRecord> out;
  const auto runs = static_cast<std::size_t>(spec.runs);
  for (std::size_t r = 0; r < spec.rates.size(); ++r)
    for (std::size_t n = 0; n < p.nodes.size(); ++n) {
      MeasurementRecord rec;
      rec.experiment = spec.name;
      rec.rate = spec.rates[r];
      rec.node = p.nodes[n];
      for (std::size_t k = 0; k < runs; ++k) rec.perRunMeans.push_back(perTask[r * runs + k][n]);
      const auto s = summarize(rec.perRunMeans);
      rec.meanCpuLoad = s.mean;
      rec.ci95Halfwidth = s.ci95;
      out.push_back(std::move(rec));
    }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return std::tie(a.rate, a.node) < std::tie(b.rate, b.node);
  });
  return out;
}

}  // namespace

std::vector<MeasurementRecord> runExperiment(const ExperimentSpec& spec, const std::string& baseDir) {
  const auto p = prepare(spec, baseDir);
  const auto runs = static_cast<std::size_t>(spec.runs);
  const auto tasks = static_cast<long>(spec.rates.size() * runs);
  std::vector<std::vector<double>> perTask(static_cast<std::size_t>(tasks));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(tasks));
#pragma omp parallel for schedule(dynamic)
  for (long t = 0; t < tasks; ++t) {
    const auto i = static_cast<std::size_t>(t);
    try {
      perTask[i] = runOnce(p, spec, i / runs, static_cast<int>(i % runs));
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return assemble(spec, p, perTask);
}

std::vector<MeasurementRecord> runExperimentSerial(const ExperimentSpec& spec, const std::string& baseDir) {
  const auto p = prepare(spec, baseDir);
  const auto runs = static_cast<std::size_t>(spec.runs);
  std::vector<std::vector<double>> perTask;
  for (std::size_t r = 0; r < spec.rates.size(); ++r)
    for (std::size_t k = 0; k < runs; ++k) perTask.push_back(runOnce(p, spec, r, static_cast<int>(k)));
  return assemble(spec, p, perTask);
}

double saturationRate(const ExperimentSpec& spec, const std::string& node, const std::string& baseDir) {
  auto s = spec;
  if (s.rates.empty()) s.rates = {1000};
  const auto p = prepare(s, baseDir);
  const auto* n = p.model.findNode(node);
  if (!n || !topo::isOshi(n->kind)) throw Error(ErrorCode::InvalidArgument, "cannot measure " + node, node);
  const auto res = simulate(p, s, 1000, 0.05, 0, s.seed);
  const auto& nr = *res.node(node);
  if (!nr.saturationEstimate)
    throw Error(ErrorCode::ZeroCost, "node " + node + " has zero per-packet cost in mode " + std::string(toString(s.mode)), node);
  return *nr.saturationEstimate;
}

double saturationRate(Mode mode, const netsim::CostModel& cost, netsim::Tunneling tunneling,
                      netsim::FlowCacheMode flowCache, const std::string& node) {
  ExperimentSpec s;
  s.name = "saturation";
  s.topologyRef = mode == Mode::OshiVll || mode == Mode::OshiPw ? "builtin:chain" : "builtin:pair";
  s.mode = mode;
  s.tunneling = tunneling;
  s.flowCache = flowCache;
  s.costModel = cost;
  s.rates = {1000};
  s.monitoredNodes = {node};
  return saturationRate(s, node);
}

namespace {

std::vector<double> range(double from, double to, double step) {
  std::vector<double> out;
  for (int i = 0; from + i * step <= to + 1e-9; ++i) out.push_back(from + i * step);
  return out;
}

std::map<std::string, ExperimentSpec> buildPresets() {
  std::map<std::string, ExperimentSpec> m;
  auto add = [&](const std::string& name, auto&& tweak) {
    ExperimentSpec s;
    s.name = name;
    s.rates = range(500, 2500, 500);
    tweak(s);
    m.emplace(name, std::move(s));
  };
  // Pair topology, IP forwarding, 1000-byte packets.
  add("pair-router", [](auto& s) { s.mode = Mode::RouterIp; });
  add("pair-oshi-ip", [](auto& s) { s.mode = Mode::OshiIp; });
  add("pair-vxlan", [](auto& s) { s.tunneling = netsim::Tunneling::Vxlan; });
  add("pair-openvpn", [](auto& s) { s.tunneling = netsim::Tunneling::OpenVpn; });
  // Chain topology over VXLAN, small packets, PE and CR monitored.
  for (auto [name, mode] : {std::pair{"chain-router", Mode::RouterIp}, {"chain-oshi-ip", Mode::OshiIp}, {"chain-vll", Mode::OshiVll}})
    add(name, [mode = mode](auto& s) {
      s.topologyRef = "builtin:chain";
      s.mode = mode;
      s.tunneling = netsim::Tunneling::Vxlan;
      s.rates = range(12500, 62500, 12500);
      s.pktBytes = 100;
    });
  // Chain over VXLAN, one-minute samples, single run.
  for (auto [name, mode] : {std::pair{"pw-ref-vll", Mode::OshiVll}, {"pw-gre", Mode::OshiPw}})
    add(name, [mode = mode](auto& s) {
      s.topologyRef = "builtin:chain";
      s.mode = mode;
      s.tunneling = netsim::Tunneling::Vxlan;
      s.rates = range(2000, 18000, 2000);
      s.samplesPerRun = 7;
      s.discardPrefix = 2;
      s.runs = 1;
      s.sampleIntervalSec = 60;
    });
  // Flow cache on and off for label switching.
  for (auto [name, fc] : {std::pair{"cache-kernel", netsim::FlowCacheMode::Kernel},
                          {"cache-userspace", netsim::FlowCacheMode::UserspaceOnly}})
    add(name, [fc = fc](auto& s) {
      s.topologyRef = "builtin:chain";
      s.mode = Mode::OshiVll;
      s.flowCache = fc;
      s.rates = range(1000, 5000, 1000);
    });
  return m;
}

const std::map<std::string, ExperimentSpec>& presetTable() {
  static const auto table = buildPresets();
  return table;
}

}  // namespace

std::vector<std::string> presetNames() {
  std::vector<std::string> out;
  for (const auto& [k, v] : presetTable()) out.push_back(k);
  return out;
}

ExperimentSpec preset(const std::string& name) {
  auto it = presetTable().find(name);
  if (it == presetTable().end()) throw Error(ErrorCode::InvalidArgument, "unknown preset " + name, name);
  return it->second;
}

ResultFormat parseResultFormat(std::string_view text) {
  if (text == "csv") return ResultFormat::Csv;
  if (text == "json") return ResultFormat::Json;
  throw Error(ErrorCode::InvalidArgument, "unknown format " + std::string(text), std::string(text));
}

std::string exportResults(std::vector<MeasurementRecord> records, ResultFormat format) {
  std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.experiment, a.rate, a.node) < std::tie(b.experiment, b.rate, b.node);
  });
  if (format == ResultFormat::Csv) {
    std::string out = "experiment,rate,node,mean,ci95\n";
    for (const auto& r : records)
      out += fmt::format("{},{},{},{},{}\n", r.experiment, r.rate, r.node, r.meanCpuLoad, r.ci95Halfwidth);
    return out;
  }
  json list = json::array();
  for (const auto& r : records)
    list.push_back({{"experiment", r.experiment},
                    {"rate", r.rate},
                    {"node", r.node},
                    {"meanCpuLoad", r.meanCpuLoad},
                    {"ci95Halfwidth", r.ci95Halfwidth},
                    {"perRunMeans", r.perRunMeans}});
  return json{{"records", list}}.dump(2) + "\n";
}

std::vector<MeasurementRecord> importResultsJson(const json& doc) {
  if (!doc.is_object() || !doc.contains("records") || !doc.at("records").is_array())
    throw Error(ErrorCode::SchemaViolation, "missing records list", "/records");
  std::vector<MeasurementRecord> out;
  const auto& list = doc.at("records");
  for (std::size_t i = 0; i < list.size(); ++i) {
    try {
      const auto& e = list[i];
      MeasurementRecord r;
      r.experiment = e.at("experiment").get<std::string>();
      r.rate = e.at("rate").get<double>();
      r.node = e.at("node").get<std::string>();
      r.meanCpuLoad = e.at("meanCpuLoad").get<double>();
      r.ci95Halfwidth = e.at("ci95Halfwidth").get<double>();
      r.perRunMeans = e.at("perRunMeans").get<std::vector<double>>();
      out.push_back(std::move(r));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::SchemaViolation, ex.what(), "/records/" + std::to_string(i));
    }
  }
  return out;
}

}  // namespace oshi::measure
