#include "oshi/topo/json_io.hpp"

#include <set>

#include "oshi/error.hpp"

namespace oshi::topo {

using nlohmann::json;

namespace {

std::string childPath(const std::string& path, const std::string& key) { return path + "/" + key; }
std::string childPath(const std::string& path, std::size_t index) { return path + "/" + std::to_string(index); }

[[noreturn]] void schemaError(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::SchemaViolation, "schema violation at " + (path.empty() ? "/" : path) + ": " + what, path);
}

// Path-tracking view over a JSON object that rejects unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) schemaError(path_, "expected an object");
  }

  const json& required(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) schemaError(childPath(path_, key), "missing required key");
    return *it;
  }

  const json* optional(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string string(const std::string& key) {
    const json& v = required(key);
    if (!v.is_string()) schemaError(childPath(path_, key), "expected a string");
    return v.get<std::string>();
  }

  std::string path(const std::string& key) const { return childPath(path_, key); }

  void rejectUnknown() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) schemaError(childPath(path_, it.key()), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const json& requireArray(const json& j, const std::string& path) {
  if (!j.is_array()) schemaError(path, "expected an array");
  return j;
}

int requireInt(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schemaError(path, "expected an integer");
  return j.get<int>();
}

std::string requireString(const json& j, const std::string& path) {
  if (!j.is_string()) schemaError(path, "expected a string");
  return j.get<std::string>();
}

std::map<std::string, std::string> stringMap(const json& j, const std::string& path) {
  if (!j.is_object()) schemaError(path, "expected an object");
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = requireString(it.value(), childPath(path, it.key()));
  return out;
}

PortRef readPortRef(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  PortRef p{r.string("node"), r.string("port")};
  r.rejectUnknown();
  return p;
}

NodeSpec readNode(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  NodeSpec n;
  n.id = r.string("id");
  auto kind = parseNodeKind(r.string("kind"));
  if (!kind) schemaError(r.path("kind"), "unknown node kind");
  n.kind = *kind;
  n.label = r.string("label");
  if (const json* lb = r.optional("loopback")) {
    auto addr = Ipv4Addr::parse(requireString(*lb, r.path("loopback")));
    if (!addr) schemaError(r.path("loopback"), "invalid IPv4 address");
    n.loopback = *addr;
  }
  if (const json* macs = r.optional("interfaceMacs")) {
    for (auto& [port, text] : stringMap(*macs, r.path("interfaceMacs"))) {
      auto mac = MacAddr::parse(text);
      if (!mac) schemaError(childPath(r.path("interfaceMacs"), port), "invalid MAC address");
      n.interfaceMacs.emplace(port, *mac);
    }
  }
  r.rejectUnknown();
  return n;
}

LinkSpec readLink(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  LinkSpec l;
  l.id = r.string("id");
  l.a = readPortRef(r.required("a"), r.path("a"));
  l.b = readPortRef(r.required("b"), r.path("b"));
  auto kind = parseLinkKind(r.string("kind"));
  if (!kind) schemaError(r.path("kind"), "unknown link kind");
  l.kind = *kind;
  if (const json* c = r.optional("costMetric")) l.costMetric = requireInt(*c, r.path("costMetric"));
  r.rejectUnknown();
  return l;
}

ServiceSpec readService(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ServiceSpec s;
  s.id = r.string("id");
  auto kind = parseServiceKind(r.string("kind"));
  if (!kind) schemaError(r.path("kind"), "unknown service kind");
  s.kind = *kind;
  const json& eps = requireArray(r.required("endpoints"), r.path("endpoints"));
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto epPath = childPath(r.path("endpoints"), i);
    ObjectReader er(eps[i], epPath);
    AccessEndpoint ep{er.string("pe"), er.string("port"), std::nullopt};
    if (const json* v = er.optional("vlan")) ep.vlan = requireInt(*v, er.path("vlan"));
    er.rejectUnknown();
    s.endpoints.push_back(std::move(ep));
  }
  if (const json* o = r.optional("options")) s.options = stringMap(*o, r.path("options"));
  r.rejectUnknown();
  return s;
}

const std::set<std::string> kKnownTopLevel{"schemaVersion", "modelName", "nodes", "links", "controllerAssignment",
                                           "services"};

}  // namespace

json exportJson(const TopologyModel& model) {
  json doc = json::object();
  if (model.extensions.is_object()) {
    for (auto it = model.extensions.begin(); it != model.extensions.end(); ++it) doc[it.key()] = it.value();
  }
  doc["schemaVersion"] = kSchemaVersion;
  doc["modelName"] = model.modelName;

  doc["nodes"] = json::array();
  for (const auto& n : model.nodes) {
    json jn{{"id", n.id}, {"kind", toString(n.kind)}, {"label", n.label}};
    if (n.loopback) jn["loopback"] = n.loopback->str();
    jn["interfaceMacs"] = json::object();
    for (const auto& [port, mac] : n.interfaceMacs) jn["interfaceMacs"][port] = mac.str();
    doc["nodes"].push_back(std::move(jn));
  }

  doc["links"] = json::array();
  for (const auto& l : model.links) {
    doc["links"].push_back({{"id", l.id},
                            {"a", {{"node", l.a.node}, {"port", l.a.port}}},
                            {"b", {{"node", l.b.node}, {"port", l.b.port}}},
                            {"kind", toString(l.kind)},
                            {"costMetric", l.costMetric}});
  }

  doc["controllerAssignment"] = json::object();
  for (const auto& [k, v] : model.controllerAssignment) doc["controllerAssignment"][k] = v;

  doc["services"] = json::array();
  for (const auto& s : model.services) {
    json eps = json::array();
    for (const auto& ep : s.endpoints) {
      json je{{"pe", ep.pe}, {"port", ep.port}};
      if (ep.vlan) je["vlan"] = *ep.vlan;
      eps.push_back(std::move(je));
    }
    json opts = json::object();
    for (const auto& [k, v] : s.options) opts[k] = v;
    doc["services"].push_back({{"id", s.id}, {"kind", toString(s.kind)}, {"endpoints", eps}, {"options", opts}});
  }
  return doc;
}

TopologyModel importJson(const json& doc) {
  if (!doc.is_object()) schemaError("", "expected an object");
  TopologyModel m;

  auto need = [&](const char* key) -> const json& {
    auto it = doc.find(key);
    if (it == doc.end()) schemaError(std::string("/") + key, "missing required key");
    return *it;
  };

  const json& version = need("schemaVersion");
  if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
    schemaError("/schemaVersion", "unsupported schema version");
  m.modelName = requireString(need("modelName"), "/modelName");

  const json& nodes = requireArray(need("nodes"), "/nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) m.nodes.push_back(readNode(nodes[i], childPath("/nodes", i)));

  const json& links = requireArray(need("links"), "/links");
  for (std::size_t i = 0; i < links.size(); ++i) m.links.push_back(readLink(links[i], childPath("/links", i)));

  m.controllerAssignment = stringMap(need("controllerAssignment"), "/controllerAssignment");

  const json& services = requireArray(need("services"), "/services");
  for (std::size_t i = 0; i < services.size(); ++i)
    m.services.push_back(readService(services[i], childPath("/services", i)));

  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (!kKnownTopLevel.count(it.key())) m.extensions[it.key()] = it.value();
  return m;
}

std::string dumpTopology(const TopologyModel& model) { return exportJson(model).dump(2) + "\n"; }

TopologyModel parseTopology(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, std::string("malformed JSON: ") + e.what(), "");
  }
  return importJson(doc);
}

}  // namespace oshi::topo
