#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oshi/netsim/cost.hpp"
#include "oshi/topo/model.hpp"

namespace oshi::measure {

enum class Mode { RouterIp, OshiIp, OshiVll, OshiPw };
std::string_view toString(Mode m);
Mode parseMode(std::string_view text);  // throws Error{InvalidArgument}

struct ExperimentSpec {
  std::string name;
  // "builtin:pair", "builtin:chain" or a topology file path (relative paths
  // resolve against the base directory given to runExperiment).
  std::string topologyRef = "builtin:pair";
  Mode mode = Mode::OshiIp;
  netsim::Tunneling tunneling = netsim::Tunneling::None;
  netsim::FlowCacheMode flowCache = netsim::FlowCacheMode::None;
  std::vector<double> rates;  // p/s
  std::size_t pktBytes = 1000;
  int samplesPerRun = 20;
  int discardPrefix = 10;
  int runs = 20;
  std::uint64_t seed = 1;
  double sampleIntervalSec = 2.0;
  std::string srcCe = "ce1";
  std::string dstCe = "ce2";
  // Empty: the PE serving srcCe plus the first CR of the model, if any.
  std::vector<std::string> monitoredNodes;
  std::optional<netsim::CostModel> costModel;  // absent: calibrated defaults

  // Throws Error{InvalidArgument}.
  void check() const;
  nlohmann::json toJson() const;
  // Missing keys keep their defaults. Throws Error{SchemaViolation} on bad
  // types and Error{InvalidArgument} via check().
  static ExperimentSpec fromJson(const nlohmann::json& j);
};

struct MeasurementRecord {
  std::string experiment;
  double rate = 0;
  std::string node;
  double meanCpuLoad = 0;
  double ci95Halfwidth = 0;
  std::vector<double> perRunMeans;

  bool operator==(const MeasurementRecord&) const = default;
};

// Mean of samples[discardPrefix..]. Throws Error{TooFewSamples}.
double sampleStatistic(const std::vector<double>& samples, std::size_t discardPrefix);

// Mean and 1.96 * sample standard deviation / sqrt(n); halfwidth 0 for n = 1.
struct Summary {
  double mean = 0;
  double ci95 = 0;
};
Summary summarize(const std::vector<double>& values);

topo::TopologyModel resolveTopology(const std::string& ref, const std::string& baseDir = {});
std::vector<std::string> monitoredNodes(const ExperimentSpec& spec, const topo::TopologyModel& model);

// Records in (rate, node) order. Runs execute in parallel (OpenMP); the
// serial variant is the reference and returns identical records.
std::vector<MeasurementRecord> runExperiment(const ExperimentSpec& spec, const std::string& baseDir = {});
std::vector<MeasurementRecord> runExperimentSerial(const ExperimentSpec& spec, const std::string& baseDir = {});

// budget / per-packet cost of `node` in the spec's configuration, measured on
// a short deterministic run. Throws Error{ZeroCost}.
double saturationRate(const ExperimentSpec& spec, const std::string& node, const std::string& baseDir = {});
// Same on the reference topology for the mode: pair for routerIp/oshiIp,
// chain for the services; node defaults to pe1.
double saturationRate(Mode mode, const netsim::CostModel& cost,
                      netsim::Tunneling tunneling = netsim::Tunneling::None,
                      netsim::FlowCacheMode flowCache = netsim::FlowCacheMode::None,
                      const std::string& node = "pe1");

std::vector<std::string> presetNames();
// Throws Error{InvalidArgument} for unknown names.
ExperimentSpec preset(const std::string& name);

enum class ResultFormat { Csv, Json };
ResultFormat parseResultFormat(std::string_view text);
// Sorted by (experiment, rate, node). CSV columns: experiment,rate,node,mean,ci95.
std::string exportResults(std::vector<MeasurementRecord> records, ResultFormat format);
// Inverse of the JSON export. Throws Error{SchemaViolation}.
std::vector<MeasurementRecord> importResultsJson(const nlohmann::json& doc);

}  // namespace oshi::measure
