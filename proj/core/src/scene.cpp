// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <fstream>

#include "streamstyle/error.hpp"
#include "streamstyle/scene.hpp"

namespace streamstyle::scene {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

json rgb_json(const style::Color& c) { return json::array({c.r, c.g, c.b}); }

json base_color_json(const style::BaseColorSource& src) {
  if (const auto* c = std::get_if<style::Color>(&src)) return {{"constant", rgb_json(*c)}};
  const auto& m = std::get<style::MappedColor>(src);
  return {{"colormap", m.map.name()}, {"attribute", m.attribute.name}};
}

json pattern_json(const style::DirectionalColorPattern& p) {
  return {{"x_source", std::string(style::to_string(p.x_source))},
          {"length", p.length},
          {"slope", p.slope},
          {"exponent", p.exponent},
          {"color_width", p.color_width},
          {"phase", p.phase},
          {"color_a", base_color_json(p.color_a)},
          {"color_b", base_color_json(p.color_b)}};
}

json band_color_json(const style::BandColorSource& src) {
  if (const auto* c = std::get_if<style::Color>(&src)) return {{"constant", rgb_json(*c)}};
  if (const auto* m = std::get_if<style::MappedColor>(&src))
    return {{"colormap", m->map.name()}, {"attribute", m->attribute.name}};
  return {{"pattern", pattern_json(std::get<style::PatternColor>(src).pattern)}};
}

json mapping_json(const style::ShapeMappingFunction& fn) {
  if (!fn.preset_name().empty()) return fn.preset_name();
  json pts = json::array();
  for (const auto& p : fn.points()) pts.push_back({p.s, p.w});
  return pts;
}

json band_json(const style::BandSpec& b) {
  json width = {{"min", b.w_min}, {"max", b.w_max}};
  if (const auto* a = std::get_if<style::AttributeRef>(&b.driver)) {
    width["attribute"] = a->name;
  } else if (const auto* s = std::get_if<style::ShapePattern>(&b.driver)) {
    width["shape"] = {{"x_source", std::string(style::to_string(s->x_source))},
                      {"length", s->length},
                      {"mapping", mapping_json(s->mapping)},
                      {"phase", s->phase}};
  }
  return {{"color", band_color_json(b.color)},
          {"width", width},
          {"depth_offset", b.depth_offset},
          {"halo", b.is_halo}};
}

}  // namespace

json style_to_json(const style::LineStyle& s) {
  json bands = json::array();
  for (const auto& b : s.bands) bands.push_back(band_json(b));
  return {{"id", s.id}, {"bands", bands}};
}

json styleset_to_json(const style::StyleSet& set) {
  json styles = json::array();
  for (const auto& s : set.styles()) styles.push_back(style_to_json(s));
  json out = {{"styles", styles}};
  if (const auto& tf = set.transfer_function()) {
    json entries = json::array();
    for (const auto& e : tf->entries)
      entries.push_back({{"range", {e.lo, e.hi}}, {"style", e.style_id}});
    out["transfer_function"] = {
        {"attribute", tf->guiding.name}, {"entries", entries}, {"default", tf->default_style}};
  } else if (!set.styles().empty()) {
    out["style"] = set.styles()[set.active_index()].id;
  }
  return out;
}

json colormaps_json() {
  json arr = json::array();
  for (const auto& m : style::builtin_colormaps()) {
    json stops = json::array();
    for (const auto& s : m.stops()) stops.push_back({{"u", s.u}, {"color", rgb_json(s.color)}});
    arr.push_back({{"name", m.name()}, {"stops", stops}});
  }
  return arr;
}

json style_presets_json() {
  json shapes = json::array();
  for (std::string_view name : style::ShapeMappingFunction::preset_names()) {
    const auto fn = style::ShapeMappingFunction::preset(name);
    json pts = json::array();
    for (const auto& p : fn->points()) pts.push_back({p.s, p.w});
    shapes.push_back({{"name", std::string(name)}, {"points", pts}});
  }
  return {{"shapes", shapes},
          {"x_sources", {"arc_length", "integration_time"}},
          {"attributes", {"t", "s", "speed"}}};
}

// ---------------------------------------------------------------------------

field::VectorFieldGrid make_dataset(const DatasetSpec& spec) {
  if (spec.path) return field::load_grid(*spec.path);
  return field::gen_analytic_field(spec.kind, spec.dims, spec.params);
}

tracer::StreamlineSet trace_scene(const field::VectorFieldGrid& grid, const SeedConfig& seeds,
                                  const tracer::TraceParams& params, tracer::TraceStats& stats,
                                  int threads) {
  tracer::SeedSpec spec = seeds.spec;
  if (!seeds.has_region) spec.region = grid.bounds();
  const auto points = tracer::seed_points(spec, grid);
  return tracer::trace_all(grid, points, params, &stats, threads);
}

raster::Frame render_frame(const field::VectorFieldGrid& grid, const tracer::StreamlineSet& lines,
                           const style::StyleSet& styles, const FrameRequest& request,
                           StageTimings& timings, raster::RasterStats* stats) {
  const geometry::Camera camera = request.camera.make(request.image.width, request.image.height);
  auto start = Clock::now();
  const style::AttributeTable table = geometry::make_attribute_table(grid, lines);
  const auto strips =
      geometry::build_strips(lines, camera, styles, table, request.global_scale, request.threads);
  timings.geometry_ms = ms_since(start);

  start = Clock::now();
  raster::Frame frame(request.image.width, request.image.height, request.image.background,
                      static_cast<float>(camera.far()));
  if (request.style_ids) frame.enable_style_ids();
  raster::RasterOptions opts;
  opts.threads = request.threads;
  raster::rasterize(strips, camera, styles, table, frame, opts, stats);
  timings.raster_ms = ms_since(start);
  return frame;
}

RunReport run_scene(const SceneConfig& config, const RunOptions& options) {
  RunReport report;
  auto start = Clock::now();
  const field::VectorFieldGrid grid = make_dataset(config.dataset);
  report.timings.load_ms = ms_since(start);

  start = Clock::now();
  const tracer::StreamlineSet lines =
      trace_scene(grid, config.seeds, config.trace, report.trace, options.threads);
  report.timings.trace_ms = ms_since(start);

  const style::StyleSet styles =
      options.phase ? config.styles.with_phase(*options.phase) : config.styles;
  FrameRequest req{config.camera, config.image, config.global_scale, options.threads, false};
  const raster::Frame frame =
      render_frame(grid, lines, styles, req, report.timings, &report.raster);

  start = Clock::now();
  report.png = raster::encode_png(frame);
  report.output = options.output ? *options.output : config.output;
  std::ofstream out(report.output, std::ios::binary);
  if (!out) throw Error("cannot write '" + report.output.string() + "'");
  out.write(reinterpret_cast<const char*>(report.png.data()),
            static_cast<std::streamsize>(report.png.size()));
  if (!out) throw Error("write failed for '" + report.output.string() + "'");
  report.timings.encode_ms = ms_since(start);
  return report;
}

}  // namespace streamstyle::scene
