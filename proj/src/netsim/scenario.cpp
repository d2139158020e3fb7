#include "oshi/netsim/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oshi/error.hpp"
#include "oshi/util/rng.hpp"

namespace oshi::netsim {

namespace {

template <typename T>
T field(const nlohmann::json& j, const char* key, T fallback, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorCode::SchemaViolation, std::string("bad value for ") + key, path + "/" + key);
  }
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

std::vector<TrafficSpec> trafficFromJson(const nlohmann::json& doc) {
  const nlohmann::json& arr = doc.is_object() && doc.contains("flows") ? doc.at("flows") : doc;
  if (!arr.is_array()) throw Error(ErrorCode::SchemaViolation, "traffic must be an array of flows", "/flows");
  std::vector<TrafficSpec> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& f = arr[i];
    std::string path = "/flows/" + std::to_string(i);
    if (!f.is_object()) throw Error(ErrorCode::SchemaViolation, "flow must be an object", path);
    for (const char* key : {"srcCe", "dstCe"})
      if (!f.contains(key)) throw Error(ErrorCode::SchemaViolation, std::string("missing ") + key, path + "/" + key);
    TrafficSpec t;
    t.id = field<std::string>(f, "id", "f" + std::to_string(i + 1), path);
    t.srcCe = field<std::string>(f, "srcCe", "", path);
    t.dstCe = field<std::string>(f, "dstCe", "", path);
    t.service = field<std::string>(f, "service", "", path);
    t.rate = field<double>(f, "rate", 0, path);
    t.pktBytes = field<std::size_t>(f, "pktBytes", 1000, path);
    t.duration = field<double>(f, "duration", 0, path);
    t.start = field<double>(f, "start", 0, path);
    t.packetsPerFlow = field<std::uint64_t>(f, "packetsPerFlow", 0, path);
    if (t.rate < 0 || t.duration < 0 || t.start < 0)
      throw Error(ErrorCode::SchemaViolation, "rate, duration and start must be >= 0", path);
    out.push_back(std::move(t));
  }
  return out;
}

nlohmann::json toJson(const std::vector<TrafficSpec>& specs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : specs) {
    nlohmann::json f{{"id", t.id},         {"srcCe", t.srcCe},     {"dstCe", t.dstCe},   {"rate", t.rate},
                     {"pktBytes", t.pktBytes}, {"duration", t.duration}, {"start", t.start}};
    if (!t.service.empty()) f["service"] = t.service;
    if (t.packetsPerFlow) f["packetsPerFlow"] = t.packetsPerFlow;
    arr.push_back(std::move(f));
  }
  return {{"flows", arr}};
}

const NodeResult* SimulationResult::node(const std::string& id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const NodeResult& n) { return n.nodeId == id; });
  return it == nodes.end() ? nullptr : &*it;
}

const FlowResult* SimulationResult::flow(const std::string& id) const {
  auto it = std::find_if(flows.begin(), flows.end(), [&](const FlowResult& f) { return f.flowId == id; });
  return it == flows.end() ? nullptr : &*it;
}

nlohmann::json SimulationResult::toJson() const {
  using nlohmann::json;
  json jn = json::array();
  for (const auto& n : nodes) {
    jn.push_back({{"nodeId", n.nodeId},
                  {"pkts", n.pkts},
                  {"bytes", n.bytes},
                  {"cost", n.cost},
                  {"cpuLoad", n.cpuLoad},
                  {"maxPacketCost", n.maxPacketCost},
                  {"saturationEstimate", n.saturationEstimate ? json(*n.saturationEstimate) : json(nullptr)},
                  {"dropped", n.dropped},
                  {"drops", n.drops},
                  {"samples", n.samples}});
  }
  json jf = json::array();
  std::uint64_t inj = 0, del = 0, drp = 0;
  for (const auto& f : flows) {
    jf.push_back({{"flowId", f.flowId},
                  {"injected", f.injected},
                  {"delivered", f.delivered},
                  {"dropped", f.dropped},
                  {"duplicates", f.duplicates},
                  {"reasonHistogram", f.reasons}});
    inj += f.injected;
    del += f.delivered;
    drp += f.dropped;
  }
  return {{"duration", duration},
          {"seed", seed},
          {"totals", {{"injected", inj}, {"delivered", del}, {"dropped", drp}}},
          {"nodes", jn},
          {"flows", jf}};
}

std::string SimulationResult::toCsv() const {
  std::string out = "nodeId,pkts,bytes,cpuLoad,saturationEstimate\n";
  for (const auto& n : nodes)
    out += fmt::format("{},{},{},{},{}\n", n.nodeId, n.pkts, n.bytes, num(n.cpuLoad),
                       n.saturationEstimate ? num(*n.saturationEstimate) : std::string());
  out += "\nflowId,injected,delivered,dropped,reasonHistogram\n";
  for (const auto& f : flows) {
    std::string hist;
    for (const auto& [r, c] : f.reasons) hist += fmt::format("{}{}:{}", hist.empty() ? "" : ";", r, c);
    out += fmt::format("{},{},{},{},{}\n", f.flowId, f.injected, f.delivered, f.dropped, hist);
  }
  return out;
}

namespace {

struct ActiveFlow {
  const TrafficSpec* spec;
  std::uint32_t tag;
  bool sameSegment;
  std::optional<std::uint16_t> vlan;
  std::shared_ptr<const Bytes> fill;
  std::int64_t firstTick, endTick;
  double acc = 0;
  std::uint64_t sent = 0;
};

}  // namespace

SimulationResult runScenario(Network& net, const std::vector<TrafficSpec>& traffic, const ScenarioOptions& options) {
  const auto& model = net.model();
  std::vector<ActiveFlow> flows;
  double endTime = options.duration;
  for (std::size_t i = 0; i < traffic.size(); ++i) {
    const auto& t = traffic[i];
    for (const auto* ce : {&t.srcCe, &t.dstCe})
      if (!net.hasHost(*ce) || net.host(*ce).port.empty())
        throw Error(ErrorCode::UnprovisionedTarget, "unknown traffic endpoint " + *ce, *ce);
    ActiveFlow f{&t, static_cast<std::uint32_t>(i + 1), !t.service.empty(), std::nullopt, nullptr, 0, 0};
    if (!t.service.empty()) {
      const auto* svc = model.findService(t.service);
      if (!svc || !net.isProvisioned(t.service))
        throw Error(ErrorCode::UnprovisionedTarget, "service " + t.service + " is not provisioned", t.service);
      const auto& src = net.host(t.srcCe);
      const auto* peer = net.peerOf(src.id, src.port);
      for (const auto& ep : svc->endpoints)
        if (peer && ep.pe == peer->node && ep.port == peer->port && ep.vlan) f.vlan = static_cast<std::uint16_t>(*ep.vlan);
    }
    util::DetRng rng(util::mixSeed(options.seed, i));
    Bytes fill(std::max<std::size_t>(t.pktBytes, 64));
    for (auto& b : fill) b = static_cast<std::uint8_t>(rng.next());
    f.fill = std::make_shared<const Bytes>(std::move(fill));
    f.firstTick = std::llround(t.start * 1000);
    f.endTick = std::llround((t.start + t.duration) * 1000);
    if (options.duration == 0) endTime = std::max(endTime, t.start + t.duration);
    flows.push_back(std::move(f));
  }

  net.resetCounters();
  SimulationResult result;
  result.duration = endTime;
  result.seed = options.seed;
  for (const auto& t : traffic) result.flows.push_back({t.id});

  std::vector<std::string> nodeIds;
  for (const auto& n : model.nodes) nodeIds.push_back(n.id);
  const std::int64_t ticks = std::llround(endTime * 1000);
  const std::int64_t sampleTicks = options.sampleInterval > 0 ? std::max<std::int64_t>(1, std::llround(options.sampleInterval * 1000)) : 0;
  std::map<std::string, double> lastCost;
  std::map<std::string, std::vector<double>> samples;

  for (std::int64_t tick = 0; tick < ticks; ++tick) {
    for (auto& f : flows) {
      if (tick < f.firstTick || tick >= f.endTick) continue;
      f.acc += f.spec->rate;
      auto n = static_cast<std::uint64_t>(std::floor(f.acc / 1000.0));
      f.acc -= static_cast<double>(n) * 1000.0;
      auto& fr = result.flows[f.tag - 1];
      for (std::uint64_t k = 0; k < n; ++k, ++f.sent) {
        std::uint16_t sport = 5001;
        if (f.spec->packetsPerFlow) sport = static_cast<std::uint16_t>(1024 + (f.sent / f.spec->packetsPerFlow) % 64000);
        Frame frame = net.hostUdpFrame(f.spec->srcCe, f.spec->dstCe, f.spec->pktBytes, f.sameSegment, sport, 5001, f.fill);
        if (f.vlan) frame.vlanTags.insert(frame.vlanTags.begin(), *f.vlan);
        frame.flowTag = f.tag;
        PacketTrace trace = net.sendFromHost(f.spec->srcCe, frame);
        ++fr.injected;
        std::size_t copies = trace.receivedBy(f.spec->dstCe);
        if (copies > 0) {
          ++fr.delivered;
          fr.duplicates += copies - 1;
        } else {
          ++fr.dropped;
          ++fr.reasons[std::string(toString(trace.drops.empty() ? DropReason::NotDelivered : trace.drops.front().reason))];
        }
      }
    }
    if (sampleTicks && (tick + 1) % sampleTicks == 0) {
      const double interval = static_cast<double>(sampleTicks) / 1000.0;
      for (const auto& id : net.oshiIds()) {
        double c = net.oshi(id).counters.cost;
        samples[id].push_back((c - lastCost[id]) / interval / net.options().cost.budget);
        lastCost[id] = c;
      }
    }
  }

  const double budget = net.options().cost.budget;
  for (const auto& id : nodeIds) {
    NodeResult r;
    r.nodeId = id;
    const CounterSet* c = net.hasOshi(id) ? &net.oshi(id).counters : &net.host(id).counters;
    r.pkts = c->pkts;
    r.bytes = c->bytes;
    r.cost = c->cost;
    r.cpuLoad = endTime > 0 ? c->cost / (endTime * budget) : 0;
    r.maxPacketCost = c->maxPacketCost;
    if (c->maxPacketCost > 0) r.saturationEstimate = budget / c->maxPacketCost;
    r.dropped = c->dropped;
    r.drops = c->drops;
    if (auto s = samples.find(id); s != samples.end()) r.samples = s->second;
    result.nodes.push_back(std::move(r));
  }
  return result;
}

}  // namespace oshi::netsim
