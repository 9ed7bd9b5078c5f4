// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "streamstyle/field.hpp"
#include "streamstyle/geometry.hpp"
#include "streamstyle/raster.hpp"
#include "streamstyle/style.hpp"
#include "streamstyle/tracer.hpp"

// JSON scene configs and the batch pipeline behind them.
namespace streamstyle::scene {

inline constexpr int kStylesetVersion = 1;

struct Finding {
  std::string pointer;  // JSON pointer into the document
  std::string message;
};

nlohmann::json findings_to_json(std::span<const Finding> findings);

struct DatasetSpec {
  // Either a file (resolved against the config directory) or an analytic field.
  std::optional<std::filesystem::path> path;
  field::AnalyticKind kind = field::AnalyticKind::abc;
  field::Dims dims{32, 32, 32};
  std::map<std::string, double> params;
};

struct SeedConfig {
  tracer::SeedSpec spec;
  // Absent region means the grid bounds.
  bool has_region = false;
};

struct CameraSpec {
  Vec3 eye{0, 0, 5};
  Vec3 look_at{0, 0, 0};
  Vec3 up{0, 1, 0};
  double fov_y = 40.0;
  double near = 0.05;
  double far = 100.0;

  geometry::Camera make(int width, int height) const;
};

struct ImageSpec {
  int width = 512;
  int height = 512;
  raster::Rgba8 background{255, 255, 255, 255};
};

struct SceneConfig {
  DatasetSpec dataset;
  SeedConfig seeds;
  tracer::TraceParams trace;
  style::StyleSet styles;
  CameraSpec camera;
  ImageSpec image;
  double global_scale = 0.01;
  std::filesystem::path output = "out.png";
};

struct ParseResult {
  std::optional<SceneConfig> config;
  std::vector<Finding> findings;
};

// Schema and cross-reference validation. Dataset channel names are read from
// the analytic generator or the SFG header, without loading arrays.
ParseResult parse_scene(const nlohmann::json& doc, const std::filesystem::path& base_dir);
// Unreadable files and JSON syntax errors become findings at pointer "".
ParseResult load_scene(const std::filesystem::path& config_path);

// The style part of a document: "styles", optional "style" and optional
// "transfer_function". Findings are relative to `doc`.
struct StyleParseResult {
  std::optional<style::StyleSet> styles;
  std::vector<Finding> findings;
};
StyleParseResult parse_styleset(const nlohmann::json& doc, std::span<const std::string> channels);

// Analytic generator or dataset path body; used by the service.
std::optional<DatasetSpec> parse_dataset(const nlohmann::json& doc, const std::string& pointer,
                                         std::vector<Finding>& findings);
std::optional<SeedConfig> parse_seeds(const nlohmann::json& doc, const std::string& pointer,
                                      std::vector<Finding>& findings);
std::optional<tracer::TraceParams> parse_trace(const nlohmann::json& doc,
                                               const std::string& pointer,
                                               std::vector<Finding>& findings);
std::optional<CameraSpec> parse_camera(const nlohmann::json& doc, const std::string& pointer,
                                       std::vector<Finding>& findings);

nlohmann::json style_to_json(const style::LineStyle& style);
nlohmann::json styleset_to_json(const style::StyleSet& styles);

// GET /colormaps and GET /style-presets payloads.
nlohmann::json colormaps_json();
nlohmann::json style_presets_json();

// ---------------------------------------------------------------------------
// Pipeline

struct StageTimings {
  double load_ms = 0.0;
  double trace_ms = 0.0;
  double geometry_ms = 0.0;
  double raster_ms = 0.0;
  double encode_ms = 0.0;
};

field::VectorFieldGrid make_dataset(const DatasetSpec& spec);

// Seeds and traces; a region that misses the grid throws TraceError.
tracer::StreamlineSet trace_scene(const field::VectorFieldGrid& grid, const SeedConfig& seeds,
                                  const tracer::TraceParams& params, tracer::TraceStats& stats,
                                  int threads);

struct FrameRequest {
  CameraSpec camera;
  ImageSpec image;
  double global_scale = 0.01;
  int threads = 1;
  bool style_ids = false;
};

raster::Frame render_frame(const field::VectorFieldGrid& grid, const tracer::StreamlineSet& lines,
                           const style::StyleSet& styles, const FrameRequest& request,
                           StageTimings& timings, raster::RasterStats* stats = nullptr);

struct RunOptions {
  int threads = 1;
  std::optional<std::filesystem::path> output;
  std::optional<double> phase;
};

struct RunReport {
  tracer::TraceStats trace;
  raster::RasterStats raster;
  StageTimings timings;
  std::filesystem::path output;
  std::vector<std::uint8_t> png;
};

// Full field -> tracer -> geometry -> raster -> PNG run; writes the PNG.
RunReport run_scene(const SceneConfig& config, const RunOptions& options);

}  // namespace streamstyle::scene
