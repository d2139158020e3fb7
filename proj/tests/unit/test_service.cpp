#include <doctest.h>
#include <httplib.h>

#include <filesystem>
#include <thread>

#include "oshi/measure/experiment.hpp"
#include "oshi/service/api.hpp"
#include "support/fixtures.hpp"

using namespace oshi;
using namespace oshi::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("oshi-api-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  void copy(const std::string& fixture) const { fs::copy_file(testing::fixturePath(fixture), path / fixture); }
};

json chainDoc() { return util::readJsonFile(testing::fixturePath("vll_chain.json")); }

Response call(ApiHandler& h, const std::string& method, const std::string& path, const json& body = nullptr) {
  return h.handle(method, path, body.is_null() ? std::string() : body.dump());
}

json trafficBody() { return util::readJsonFile(testing::fixturePath("traffic.json")); }

}  // namespace

TEST_SUITE("api") {
  TEST_CASE("no topology yet") {
    ApiHandler h;
    auto r = call(h, "GET", "/api/topology");
    CHECK(r.status == 404);
    CHECK(r.body.at("code") == "NO_TOPOLOGY");
    CHECK(call(h, "POST", "/api/provision").status == 404);
    CHECK(call(h, "GET", "/api/plan").status == 404);
    CHECK(call(h, "GET", "/api/counters").body.at("code") == "NO_SESSION");
  }

  TEST_CASE("put then get returns the same topology") {
    ApiHandler h;
    auto put = call(h, "PUT", "/api/topology", chainDoc());
    REQUIRE(put.status == 200);
    CHECK(put.body.at("validation").at("ok") == true);
    auto get = call(h, "GET", "/api/topology");
    CHECK(get.status == 200);
    CHECK(get.body == topo::exportJson(topo::importJson(chainDoc())));
  }

  TEST_CASE("validate reports violations without storing") {
    ApiHandler h;
    auto r = call(h, "POST", "/api/validate", util::readJsonFile(testing::fixturePath("broken.json")));
    CHECK(r.status == 200);
    CHECK(r.body.at("ok") == false);
    CHECK_FALSE(r.body.at("violations").empty());
    CHECK(call(h, "GET", "/api/topology").status == 404);
    CHECK(call(h, "POST", "/api/validate", chainDoc()).body.at("ok") == true);
  }

  TEST_CASE("provision, counters, teardown") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    auto p = call(h, "POST", "/api/provision");
    REQUIRE(p.status == 200);
    REQUIRE(p.body.at("services").size() == 1);
    CHECK(p.body.at("services")[0].at("id") == "vll1");
    auto c = call(h, "GET", "/api/counters");
    CHECK(c.status == 200);
    CHECK(c.body.at("nodes").contains("pe1"));
    CHECK(c.body.at("hosts").contains("ce1"));
    auto t = call(h, "POST", "/api/teardown/vll1");
    CHECK(t.status == 200);
    CHECK(t.body.at("services").empty());
    auto again = call(h, "POST", "/api/teardown/vll1");
    CHECK(again.status == 404);
    CHECK(again.body.at("code") == "UNKNOWN_SERVICE");
  }

  TEST_CASE("teardown before provisioning") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    auto r = call(h, "POST", "/api/teardown/vll1");
    CHECK(r.status == 409);
    CHECK(r.body.at("code") == "NO_SESSION");
  }

  TEST_CASE("simulate delivers on the provisioned VLL") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    auto body = trafficBody();
    auto doc = json{{"traffic", body}, {"seed", 3}, {"sampleInterval", 0.1}};
    auto r = call(h, "POST", "/api/simulate", doc);
    REQUIRE(r.status == 200);
    CHECK(r.body.at("totals").at("injected") == 1250);
    CHECK(r.body.at("seed") == 3);
    // The VLL owns both CE ports, so routed traffic reaches ce2 still addressed to the gateway.
    CHECK(r.body.at("flows")[0].at("reasonHistogram") == json{{"NOT_FOR_HOST", 1000}});
    CHECK(r.body.at("flows")[1].at("delivered") == 250);
    // Same body, same answer.
    CHECK(call(h, "POST", "/api/simulate", doc).body == r.body);
    CHECK(call(h, "GET", "/api/counters").body.at("lastSimulation") == r.body);
  }

  TEST_CASE("simulate after teardown reports the unprovisioned service") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    REQUIRE(call(h, "POST", "/api/provision").status == 200);
    REQUIRE(call(h, "POST", "/api/teardown/vll1").status == 200);
    auto r = call(h, "POST", "/api/simulate", json{{"traffic", trafficBody()}});
    CHECK(r.status == 409);
    CHECK(r.body.at("code") == "UNPROVISIONED_TARGET");
    CHECK(r.body.at("subject") == "vll1");
  }

  TEST_CASE("simulate with network options starts a fresh session") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    REQUIRE(call(h, "POST", "/api/provision").status == 200);
    REQUIRE(call(h, "POST", "/api/teardown/vll1").status == 200);
    auto r = call(h, "POST", "/api/simulate", json{{"traffic", trafficBody()}, {"tunneling", "vxlan"}});
    CHECK(r.status == 200);
    CHECK(r.body.at("flows")[1].at("delivered") == 250);
    auto bad = call(h, "POST", "/api/simulate", json{{"traffic", trafficBody()}, {"tunneling", "carrier-pigeon"}});
    CHECK(bad.status == 422);
    CHECK(bad.body.at("code") == "UNKNOWN_KIND");
  }

  TEST_CASE("results from a stored file or a spec") {
    TempDir dir;
    dir.copy("small.experiment.json");
    dir.copy("vll_chain.json");
    ApiHandler h(dir.path.string());
    auto r = call(h, "GET", "/api/results/small");
    REQUIRE(r.status == 200);
    CHECK(r.body.at("records").size() == 4);
    const std::vector<measure::MeasurementRecord> stored{{"saved", 1000, "pe1", 0.5, 0.01, {0.5}}};
    util::writeTextFile((dir.path / "saved.results.json").string(), measure::exportResults(stored, measure::ResultFormat::Json));
    auto s = call(h, "GET", "/api/results/saved");
    REQUIRE(s.status == 200);
    CHECK(measure::importResultsJson(s.body) == stored);
    CHECK(call(h, "GET", "/api/results/missing").status == 404);
    CHECK(call(h, "GET", "/api/results/..%2Fetc").status == 404);
  }

  TEST_CASE("plan on a synthetic pool or the testbed mapping") {
    TempDir dir;
    ApiHandler h(dir.path.string(), topo::importJson(chainDoc()));
    auto r = call(h, "GET", "/api/plan");
    REQUIRE(r.status == 200);
    CHECK(r.body.at("mapping").size() == 6);
    auto pool = util::readJsonFile(testing::fixturePath("resources.json"));
    util::writeTextFile((dir.path / "topology-to-testbed.json").string(),
                        json{{"vms", pool}, {"overrides", {{"pe1", "vm8"}}}}.dump());
    auto m = call(h, "GET", "/api/plan");
    REQUIRE(m.status == 200);
    CHECK(m.body.at("mapping").at("pe1") == "vm8");
    util::writeTextFile((dir.path / "topology-to-testbed.json").string(), json{{"vms", json::array()}}.dump());
    CHECK(call(h, "GET", "/api/plan").body.at("code") == "INSUFFICIENT_VMS");
  }

  TEST_CASE("routing and body errors") {
    ApiHandler h;
    CHECK(call(h, "GET", "/api/nowhere").status == 404);
    CHECK(call(h, "DELETE", "/api/topology").status == 405);
    CHECK(call(h, "GET", "/api/provision").status == 405);
    auto bad = h.handle("PUT", "/api/topology", "{not json");
    CHECK(bad.status == 400);
    CHECK(bad.body.at("code") == "SCHEMA_VIOLATION");
    CHECK(call(h, "PUT", "/api/topology", json{{"nodes", 3}}).status == 400);
    for (const auto& key : {"code", "message", "subject"}) CHECK(bad.body.contains(key));
  }

  TEST_CASE("status mapping") {
    CHECK(statusFor("SCHEMA_VIOLATION") == 400);
    CHECK(statusFor("FILE_NOT_FOUND") == 404);
    CHECK(statusFor("UNPROVISIONED_TARGET") == 409);
    CHECK(statusFor("NO_PATH") == 422);
  }
}

TEST_SUITE("http") {
  TEST_CASE("loopback server answers the API") {
    ApiHandler h(".", topo::importJson(chainDoc()));
    HttpServer server(h);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.listen(); });
    httplib::Client client("127.0.0.1", port);
    client.set_connection_timeout(5);

    auto get = client.Get("/api/topology");
    REQUIRE(get);
    CHECK(get->status == 200);
    CHECK(get->get_header_value("Content-Type") == "application/json");
    CHECK(json::parse(get->body).at("nodes").size() == 6);

    auto prov = client.Post("/api/provision", "", "application/json");
    REQUIRE(prov);
    CHECK(prov->status == 200);

    auto sim = client.Post("/api/simulate", json{{"traffic", trafficBody()}}.dump(), "application/json");
    REQUIRE(sim);
    CHECK(sim->status == 200);
    CHECK(json::parse(sim->body).at("flows")[1].at("delivered") == 250);

    auto missing = client.Get("/api/results/none");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto put = client.Put("/api/topology", "[", "application/json");
    REQUIRE(put);
    CHECK(put->status == 400);

    server.stop();
    t.join();
  }
}
