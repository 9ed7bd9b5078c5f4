// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/service.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

#include "streamstyle/binary_io.hpp"
#include "streamstyle/error.hpp"

namespace streamstyle::service {

using nlohmann::json;

namespace {

Response json_response(int status, const json& body) {
  Response r;
  r.status = status;
  r.body = body.dump();
  return r;
}

Response error_response(int status, const std::string& message,
                        const std::vector<scene::Finding>& findings = {}) {
  json body = {{"error", message}};
  if (!findings.empty()) body["findings"] = scene::findings_to_json(findings);
  return json_response(status, body);
}

std::optional<json> parse_body(const std::string& body, Response& err) {
  try {
    json doc = json::parse(body);
    if (!doc.is_object()) {
      err = error_response(400, "request body must be a JSON object");
      return std::nullopt;
    }
    return doc;
  } catch (const json::parse_error& e) {
    err = error_response(400, std::string("malformed JSON: ") + e.what());
    return std::nullopt;
  }
}

void unknown_keys(const json& doc, std::initializer_list<std::string_view> keys,
                  std::vector<scene::Finding>& findings) {
  for (const auto& [k, v] : doc.items()) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end())
      findings.push_back({"/" + k, "unknown field"});
  }
}

json stats_json(const tracer::TraceStats& s) {
  return {{"seeds", s.seeds},
          {"lines", s.lines},
          {"dropped", s.dropped},
          {"vertices", s.vertices},
          {"drop_reasons", s.drop_reasons}};
}

double ms_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count();
}

std::string fixed3(double v) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(3);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------

Session::Session(std::string id, field::VectorFieldGrid grid, tracer::StreamlineSet lines,
                 tracer::TraceStats stats)
    : id_(std::move(id)), grid_(std::move(grid)), lines_(std::move(lines)), stats_(std::move(stats)) {}

std::shared_ptr<const StyleState> Session::style() const {
  std::lock_guard lock(style_mutex_);
  return style_;
}

void Session::set_style(std::shared_ptr<const StyleState> next) {
  std::lock_guard lock(style_mutex_);
  style_ = std::move(next);
}

Service::Service(ServiceOptions options) : options_(options) {}

std::shared_ptr<Session> Service::find(const std::string& session_id) const {
  std::lock_guard lock(sessions_mutex_);
  const auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : it->second;
}

Response Service::create_session(const std::string& body) {
  Response err;
  const auto doc = parse_body(body, err);
  if (!doc) return err;

  std::vector<scene::Finding> findings;
  unknown_keys(*doc, {"dataset", "seeds", "trace"}, findings);
  for (const char* key : {"dataset", "seeds", "trace"}) {
    if (!doc->contains(key)) findings.push_back({std::string("/") + key, "missing required field"});
  }
  if (!findings.empty()) return error_response(400, "invalid session request", findings);

  // Uploaded grids arrive inline; server-side paths are not accepted.
  std::optional<field::VectorFieldGrid> uploaded;
  std::optional<scene::DatasetSpec> dataset;
  const json& ds = (*doc)["dataset"];
  if (ds.is_object() && ds.contains("sfg_base64")) {
    if (ds.size() != 1 || !ds["sfg_base64"].is_string()) {
      findings.push_back({"/dataset/sfg_base64", "expected a lone base64 string"});
    } else if (auto bytes = base64_decode(ds["sfg_base64"].get<std::string>())) {
      std::istringstream in(*bytes);
      try {
        uploaded = field::read_sfg(in);
      } catch (const LoadError& e) {
        findings.push_back({"/dataset/sfg_base64", e.what()});
      }
    } else {
      findings.push_back({"/dataset/sfg_base64", "invalid base64"});
    }
  } else if (ds.is_object() && ds.contains("path")) {
    findings.push_back({"/dataset/path", "file paths are not accepted; upload with sfg_base64"});
  } else {
    dataset = scene::parse_dataset(ds, "/dataset", findings);
  }
  const auto seeds = scene::parse_seeds((*doc)["seeds"], "/seeds", findings);
  const auto trace = scene::parse_trace((*doc)["trace"], "/trace", findings);
  if (!findings.empty()) return error_response(400, "invalid session request", findings);

  try {
    field::VectorFieldGrid grid =
        uploaded ? std::move(*uploaded) : scene::make_dataset(*dataset);
    tracer::TraceStats stats;
    tracer::StreamlineSet lines =
        scene::trace_scene(grid, *seeds, *trace, stats, options_.render_threads);
    if (lines.lines.empty()) {
      json body = {{"error", "no streamline could be traced"}, {"stats", stats_json(stats)}};
      return json_response(422, body);
    }
    std::string id;
    {
      std::lock_guard lock(sessions_mutex_);
      id = "s" + std::to_string(next_id_++);
      sessions_[id] = std::make_shared<Session>(id, std::move(grid), std::move(lines), stats);
    }
    return json_response(201, {{"session_id", id}, {"stats", stats_json(stats)}});
  } catch (const TraceError& e) {
    json body = {{"error", e.what()}};
    if (e.kind() == TraceError::Kind::region_outside)
      body["drop_reasons"] = {{"seed_outside", seeds->spec.count}};
    return json_response(422, body);
  } catch (const std::exception& e) {
    return error_response(422, e.what());
  }
}

Response Service::put_style(const std::string& session_id, const std::string& body) {
  const auto session = find(session_id);
  if (!session) return error_response(404, "unknown session '" + session_id + "'");
  Response err;
  const auto doc = parse_body(body, err);
  if (!doc) return err;

  std::vector<scene::Finding> findings;
  unknown_keys(*doc, {"styleset_version", "styles", "style", "transfer_function", "global_scale",
                      "background"},
               findings);
  if (doc->contains("styleset_version") && (*doc)["styleset_version"] != scene::kStylesetVersion)
    findings.push_back({"/styleset_version", "unsupported styleset_version (expected 1)"});

  json style_doc = json::object();
  for (const char* key : {"styles", "style", "transfer_function"}) {
    if (doc->contains(key)) style_doc[key] = (*doc)[key];
  }
  auto parsed = scene::parse_styleset(style_doc, session->lines().channels);
  findings.insert(findings.end(), parsed.findings.begin(), parsed.findings.end());

  auto next = std::make_shared<StyleState>();
  if (const auto it = doc->find("global_scale"); it != doc->end()) {
    if (!it->is_number() || !(it->get<double>() > 0.0) || !std::isfinite(it->get<double>()))
      findings.push_back({"/global_scale", "global_scale must be a finite number > 0"});
    else
      next->global_scale = it->get<double>();
  }
  if (const auto it = doc->find("background"); it != doc->end()) {
    bool ok = it->is_array() && it->size() == 4;
    for (std::size_t i = 0; ok && i < 4; ++i)
      ok = (*it)[i].is_number_integer() && (*it)[i].get<int>() >= 0 && (*it)[i].get<int>() <= 255;
    if (!ok)
      findings.push_back({"/background", "expected four integers in [0, 255]"});
    else
      for (std::size_t i = 0; i < 4; ++i)
        next->background[i] = static_cast<std::uint8_t>((*it)[i].get<int>());
  }
  if (!findings.empty() || !parsed.styles)
    return json_response(409, {{"findings", scene::findings_to_json(findings)}});

  next->styles = std::move(*parsed.styles);
  {
    std::lock_guard lock(sessions_mutex_);
    next->revision = next_revision_++;
  }
  const auto revision = next->revision;
  session->set_style(std::move(next));
  return json_response(200, {{"findings", json::array()}, {"revision", revision}});
}

Response Service::render(const std::string& session_id, const std::string& body) {
  const auto session = find(session_id);
  if (!session) return error_response(404, "unknown session '" + session_id + "'");
  Response err;
  const auto doc = parse_body(body, err);
  if (!doc) return err;

  std::vector<scene::Finding> findings;
  unknown_keys(*doc, {"camera", "width", "height", "phase"}, findings);
  std::optional<scene::CameraSpec> camera;
  if (doc->contains("camera"))
    camera = scene::parse_camera((*doc)["camera"], "/camera", findings);
  else
    findings.push_back({"/camera", "missing required field"});
  int size[2] = {0, 0};
  const char* dims[2] = {"width", "height"};
  for (int i = 0; i < 2; ++i) {
    const auto it = doc->find(dims[i]);
    if (it == doc->end() || !it->is_number_integer() || it->get<long long>() < 1 ||
        it->get<long long>() > 16384)
      findings.push_back({std::string("/") + dims[i], "expected an integer in [1, 16384]"});
    else
      size[i] = it->get<int>();
  }
  if (size[0] > 0 && size[1] > 0 &&
      static_cast<long long>(size[0]) * size[1] > options_.max_pixels)
    findings.push_back({"/width", "image too large"});
  std::optional<double> phase;
  if (const auto it = doc->find("phase"); it != doc->end()) {
    if (!it->is_number() || it->get<double>() < 0.0 || it->get<double>() >= 1.0)
      findings.push_back({"/phase", "phase must be a number in [0, 1)"});
    else
      phase = it->get<double>();
  }
  if (!findings.empty()) return error_response(400, "invalid render request", findings);

  const auto state = session->style();
  if (!state) return error_response(422, "style state was never set for this session");

  const auto start = std::chrono::steady_clock::now();
  scene::FrameRequest req;
  req.camera = *camera;
  req.image = {size[0], size[1], state->background};
  req.global_scale = state->global_scale;
  req.threads = options_.render_threads;
  scene::StageTimings timings;
  try {
    const style::StyleSet styles = phase ? state->styles.with_phase(*phase) : state->styles;
    const raster::Frame frame =
        scene::render_frame(session->grid(), session->lines(), styles, req, timings);
    const auto enc = std::chrono::steady_clock::now();
    const auto png = raster::encode_png(frame);
    timings.encode_ms = ms_since(enc);
    session->count_render();

    Response r;
    r.content_type = "image/png";
    r.body.assign(png.begin(), png.end());
    r.headers["X-Render-Millis"] = "geometry=" + fixed3(timings.geometry_ms) +
                                   ";raster=" + fixed3(timings.raster_ms) +
                                   ";encode=" + fixed3(timings.encode_ms) +
                                   ";total=" + fixed3(ms_since(start));
    r.headers["X-Style-Revision"] = std::to_string(state->revision);
    return r;
  } catch (const std::exception& e) {
    return error_response(422, e.what());
  }
}

Response Service::colormaps() const { return json_response(200, scene::colormaps_json()); }

Response Service::style_presets() const {
  return json_response(200, scene::style_presets_json());
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
}

std::string base64_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const auto n = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                   (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                   static_cast<std::uint8_t>(bytes[i + 2]);
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(n >> s) & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t n = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) n |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += rest == 2 ? kAlphabet[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  std::array<int, 256> lut;
  lut.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i)
    lut[static_cast<std::uint8_t>(kAlphabet[i])] = static_cast<int>(i);

  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  int pad = 0;
  std::size_t symbols = 0;
  for (char ch : text) {
    if (ch == ' ' || ch == '\n' || ch == '\r' || ch == '\t') continue;
    ++symbols;
    if (ch == '=') {
      if (++pad > 2) return std::nullopt;
      continue;
    }
    if (pad > 0) return std::nullopt;
    const int v = lut[static_cast<std::uint8_t>(ch)];
    if (v < 0) return std::nullopt;
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xff);
    }
  }
  if (symbols % 4 != 0) return std::nullopt;
  return out;
}

}  // namespace streamstyle::service
