// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "streamstyle/scene.hpp"

// HTTP render service: sessions hold a dataset and its traced lines; styles and
// cameras change per request without re-tracing.
namespace streamstyle::service {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;
};

// Immutable once published; renders hold a shared_ptr to the one they started with.
struct StyleState {
  style::StyleSet styles;
  double global_scale = 0.01;
  raster::Rgba8 background{255, 255, 255, 255};
  std::uint64_t revision = 0;
};

class Session {
 public:
  Session(std::string id, field::VectorFieldGrid grid, tracer::StreamlineSet lines,
          tracer::TraceStats stats);

  const std::string& id() const { return id_; }
  const field::VectorFieldGrid& grid() const { return grid_; }
  const tracer::StreamlineSet& lines() const { return lines_; }
  const tracer::TraceStats& trace_stats() const { return stats_; }

  std::shared_ptr<const StyleState> style() const;
  void set_style(std::shared_ptr<const StyleState> next);

  std::size_t render_count() const { return renders_.load(); }
  void count_render() { ++renders_; }

 private:
  std::string id_;
  field::VectorFieldGrid grid_;
  tracer::StreamlineSet lines_;
  tracer::TraceStats stats_;
  mutable std::mutex style_mutex_;
  std::shared_ptr<const StyleState> style_;
  std::atomic<std::size_t> renders_{0};
};

struct ServiceOptions {
  int render_threads = 1;
  // Upper bound on width * height for one render.
  long long max_pixels = 4096LL * 4096LL;
};

/// Transport-independent request handlers. Thread-safe.
class Service {
 public:
  explicit Service(ServiceOptions options = {});

  Response create_session(const std::string& body);
  Response put_style(const std::string& session_id, const std::string& body);
  Response render(const std::string& session_id, const std::string& body);
  Response colormaps() const;
  Response style_presets() const;

  std::shared_ptr<Session> find(const std::string& session_id) const;

 private:
  ServiceOptions options_;
  mutable std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  std::uint64_t next_revision_ = 1;
};

// RFC 4648 decoding; whitespace is skipped. Returns nullopt on bad input.
std::optional<std::string> base64_decode(std::string_view text);
std::string base64_encode(std::string_view bytes);

// Routes the Service handlers over HTTP. listen() blocks until stop() is
// called from another thread.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port; see port() after bind. False if binding fails.
  bool bind(const std::string& addr, int port);
  int port() const { return port_; }
  bool listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

}  // namespace streamstyle::service
