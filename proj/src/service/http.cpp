#include <httplib.h>

#include "oshi/service/api.hpp"

namespace oshi::service {

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(ApiHandler& handler) : impl_(std::make_unique<Impl>()) {
  auto dispatch = [&handler](const httplib::Request& req, httplib::Response& res) {
    const auto r = handler.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  auto& s = impl_->server;
  s.Get(R"(/api/.*)", dispatch);
  s.Put(R"(/api/.*)", dispatch);
  s.Post(R"(/api/.*)", dispatch);
  s.Delete(R"(/api/.*)", dispatch);
  s.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  s.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& addr, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(addr);
  return impl_->server.bind_to_port(addr, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace oshi::service
