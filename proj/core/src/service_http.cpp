// SPDX-License-Identifier: Apache-2.0
#include <httplib.h>

#include "streamstyle/service.hpp"

namespace streamstyle::service {

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& out, const Response& r) {
  out.status = r.status;
  for (const auto& [k, v] : r.headers) out.set_header(k, v);
  out.set_content(r.body, r.content_type);
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  srv.Post("/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.create_session(req.body));
  });
  srv.Put(R"(/sessions/([^/]+)/style)",
          [&service](const httplib::Request& req, httplib::Response& res) {
            send(res, service.put_style(req.matches[1], req.body));
          });
  srv.Post(R"(/sessions/([^/]+)/render)",
           [&service](const httplib::Request& req, httplib::Response& res) {
             send(res, service.render(req.matches[1], req.body));
           });
  srv.Get("/colormaps", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, service.colormaps());
  });
  srv.Get("/style-presets", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, service.style_presets());
  });
  // The UI is served from another origin during development.
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Expose-Headers", "X-Render-Millis, X-Style-Revision");
    res.status = 204;
  });
}

HttpServer::~HttpServer() = default;

bool HttpServer::bind(const std::string& addr, int port) {
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(addr);
    return port_ > 0;
  }
  if (!impl_->server.bind_to_port(addr, port)) return false;
  port_ = port;
  return true;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace streamstyle::service
