// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>

#include "streamstyle/error.hpp"
#include "streamstyle/scene.hpp"

namespace streamstyle::scene {

using nlohmann::json;

namespace {

std::string child(const std::string& ptr, std::string_view key) {
  std::string escaped;
  for (char c : key) {
    if (c == '~')
      escaped += "~0";
    else if (c == '/')
      escaped += "~1";
    else
      escaped += c;
  }
  return ptr + "/" + escaped;
}
std::string child(const std::string& ptr, std::size_t index) {
  return ptr + "/" + std::to_string(index);
}

// Collects findings while walking a document. Accessors return nullopt after
// recording a finding; callers keep going so one pass reports everything.
class Reader {
 public:
  explicit Reader(std::vector<Finding>& out) : out_(out) {}

  void fail(const std::string& ptr, std::string msg) { out_.push_back({ptr, std::move(msg)}); }
  std::size_t count() const { return out_.size(); }

  bool object(const json& j, const std::string& ptr, std::initializer_list<std::string_view> keys) {
    if (!j.is_object()) {
      fail(ptr, "expected an object");
      return false;
    }
    for (const auto& [k, v] : j.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) fail(child(ptr, k), "unknown field");
    }
    return true;
  }

  const json* member(const json& obj, std::string_view key, const std::string& ptr,
                     bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(child(ptr, key), "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json& obj, std::string_view key, const std::string& ptr,
                               std::optional<double> fallback) {
    const json* v = member(obj, key, ptr, !fallback.has_value());
    if (!v) return fallback;
    if (!v->is_number() || !std::isfinite(v->get<double>())) {
      fail(child(ptr, key), "expected a finite number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<long long> integer(const json& obj, std::string_view key, const std::string& ptr,
                                   std::optional<long long> fallback, long long lo, long long hi) {
    const json* v = member(obj, key, ptr, !fallback.has_value());
    if (!v) return fallback;
    if (!v->is_number_integer()) {
      fail(child(ptr, key), "expected an integer");
      return std::nullopt;
    }
    const auto i = v->get<long long>();
    if (i < lo || i > hi) {
      fail(child(ptr, key),
           "integer out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      return std::nullopt;
    }
    return i;
  }

  std::optional<std::string> string(const json& obj, std::string_view key, const std::string& ptr,
                                    std::optional<std::string> fallback) {
    const json* v = member(obj, key, ptr, !fallback.has_value());
    if (!v) return fallback;
    if (!v->is_string()) {
      fail(child(ptr, key), "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const json& obj, std::string_view key, const std::string& ptr,
                              bool fallback) {
    const json* v = member(obj, key, ptr, false);
    if (!v) return fallback;
    if (!v->is_boolean()) {
      fail(child(ptr, key), "expected a boolean");
      return std::nullopt;
    }
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const json& j, const std::string& ptr,
                                             std::size_t n) {
    if (!j.is_array() || j.size() != n) {
      fail(ptr, "expected an array of " + std::to_string(n) + " numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
      if (!j[i].is_number() || !std::isfinite(j[i].get<double>())) {
        fail(child(ptr, i), "expected a finite number");
        return std::nullopt;
      }
      out.push_back(j[i].get<double>());
    }
    return out;
  }

  std::optional<Vec3> vec3(const json& obj, std::string_view key, const std::string& ptr,
                           std::optional<Vec3> fallback) {
    const json* v = member(obj, key, ptr, !fallback.has_value());
    if (!v) return fallback;
    const auto a = numbers(*v, child(ptr, key), 3);
    if (!a) return std::nullopt;
    return Vec3{(*a)[0], (*a)[1], (*a)[2]};
  }

 private:
  std::vector<Finding>& out_;
};

// ---------------------------------------------------------------------------
// Styles

class StyleReader {
 public:
  StyleReader(Reader& r, std::span<const std::string> channels) : r_(r), channels_(channels) {}

  std::optional<style::AttributeRef> attribute(const json& j, const std::string& ptr) {
    if (!j.is_string()) {
      r_.fail(ptr, "expected an attribute name");
      return std::nullopt;
    }
    try {
      return style::resolve_attribute(channels_, j.get<std::string>());
    } catch (const StyleError&) {
      r_.fail(ptr, "unknown attribute '" + j.get<std::string>() + "'");
      return std::nullopt;
    }
  }

  std::optional<style::Color> rgb(const json& j, const std::string& ptr) {
    const auto a = r_.numbers(j, ptr, 3);
    if (!a) return std::nullopt;
    for (std::size_t i = 0; i < 3; ++i) {
      if ((*a)[i] < 0.0 || (*a)[i] > 1.0) {
        r_.fail(child(ptr, i), "color components must lie in [0, 1]");
        return std::nullopt;
      }
    }
    return style::Color{(*a)[0], (*a)[1], (*a)[2]};
  }

  std::optional<style::MappedColor> mapped(const json& j, const std::string& ptr) {
    const auto name = r_.string(j, "colormap", ptr, std::nullopt);
    const json* attr = r_.member(j, "attribute", ptr, true);
    std::optional<style::MappedColor> out;
    const style::ColorMap* map = nullptr;
    if (name) {
      map = style::find_colormap(*name);
      if (!map) r_.fail(child(ptr, "colormap"), "unknown colormap '" + *name + "'");
    }
    std::optional<style::AttributeRef> ref;
    if (attr) ref = attribute(*attr, child(ptr, "attribute"));
    if (map && ref) out = style::MappedColor{*map, *ref};
    return out;
  }

  std::optional<style::BaseColorSource> base_color(const json& j, const std::string& ptr) {
    if (!j.is_object()) {
      r_.fail(ptr, "expected a color source object");
      return std::nullopt;
    }
    if (j.contains("constant")) {
      if (!r_.object(j, ptr, {"constant"})) return std::nullopt;
      if (auto c = rgb(j["constant"], child(ptr, "constant"))) return style::BaseColorSource{*c};
      return std::nullopt;
    }
    if (j.contains("colormap")) {
      if (!r_.object(j, ptr, {"colormap", "attribute"})) return std::nullopt;
      if (auto m = mapped(j, ptr)) return style::BaseColorSource{std::move(*m)};
      return std::nullopt;
    }
    if (j.contains("pattern")) {
      r_.fail(child(ptr, "pattern"), "directional patterns cannot be nested");
      return std::nullopt;
    }
    r_.fail(ptr, "color source needs one of 'constant', 'colormap', 'pattern'");
    return std::nullopt;
  }

  std::optional<style::BandColorSource> band_color(const json& j, const std::string& ptr) {
    if (j.is_object() && j.contains("pattern")) {
      if (!r_.object(j, ptr, {"pattern"})) return std::nullopt;
      if (auto p = pattern(j["pattern"], child(ptr, "pattern")))
        return style::BandColorSource{style::PatternColor{std::move(*p)}};
      return std::nullopt;
    }
    auto base = base_color(j, ptr);
    if (!base) return std::nullopt;
    return std::visit([](auto&& v) { return style::BandColorSource{std::move(v)}; },
                      std::move(*base));
  }

  std::optional<style::XSource> x_source(const json& j, const std::string& ptr) {
    const auto name = r_.string(j, "x_source", ptr, std::string("arc_length"));
    if (!name) return std::nullopt;
    const auto x = style::parse_x_source(*name);
    if (!x) r_.fail(child(ptr, "x_source"), "x_source must be 'arc_length' or 'integration_time'");
    return x;
  }

  std::optional<style::DirectionalColorPattern> pattern(const json& j, const std::string& ptr) {
    if (!r_.object(j, ptr,
                   {"x_source", "length", "slope", "exponent", "color_width", "phase", "color_a",
                    "color_b"}))
      return std::nullopt;
    const std::size_t before = r_.count();
    style::DirectionalColorPattern p;
    const auto xs = x_source(j, ptr);
    const auto l = r_.number(j, "length", ptr, std::nullopt);
    const auto a = r_.number(j, "slope", ptr, 0.0);
    const auto c = r_.number(j, "exponent", ptr, 1.0);
    const auto w = r_.number(j, "color_width", ptr, 0.5);
    const auto ph = r_.number(j, "phase", ptr, 0.0);
    const json* ca = r_.member(j, "color_a", ptr, true);
    const json* cb = r_.member(j, "color_b", ptr, true);
    std::optional<style::BaseColorSource> col_a, col_b;
    if (ca) col_a = base_color(*ca, child(ptr, "color_a"));
    if (cb) col_b = base_color(*cb, child(ptr, "color_b"));
    if (r_.count() != before || !xs || !l || !a || !c || !w || !ph || !col_a || !col_b)
      return std::nullopt;
    p.x_source = *xs;
    p.length = *l;
    p.slope = *a;
    p.exponent = *c;
    p.color_width = *w;
    p.phase = *ph;
    p.color_a = std::move(*col_a);
    p.color_b = std::move(*col_b);
    return p;
  }

  std::optional<style::ShapeMappingFunction> mapping(const json& j, const std::string& ptr) {
    if (j.is_string()) {
      auto m = style::ShapeMappingFunction::preset(j.get<std::string>());
      if (!m) r_.fail(ptr, "unknown shape preset '" + j.get<std::string>() + "'");
      return m;
    }
    if (!j.is_array()) {
      r_.fail(ptr, "expected a preset name or an array of [s, w] control points");
      return std::nullopt;
    }
    std::vector<style::ShapeMappingFunction::Point> pts;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const auto p = r_.numbers(j[i], child(ptr, i), 2);
      if (!p) return std::nullopt;
      pts.push_back({(*p)[0], (*p)[1]});
    }
    try {
      return style::ShapeMappingFunction(std::move(pts));
    } catch (const StyleError& e) {
      r_.fail(ptr, e.what());
      return std::nullopt;
    }
  }

  std::optional<style::ShapePattern> shape(const json& j, const std::string& ptr) {
    if (!r_.object(j, ptr, {"x_source", "length", "mapping", "phase"})) return std::nullopt;
    const auto xs = x_source(j, ptr);
    const auto l = r_.number(j, "length", ptr, std::nullopt);
    const auto ph = r_.number(j, "phase", ptr, 0.0);
    const json* m = r_.member(j, "mapping", ptr, true);
    std::optional<style::ShapeMappingFunction> fn;
    if (m) fn = mapping(*m, child(ptr, "mapping"));
    if (!xs || !l || !ph || !fn) return std::nullopt;
    return style::ShapePattern{*xs, *l, std::move(*fn), *ph};
  }

  std::optional<style::BandSpec> band(const json& j, const std::string& ptr) {
    if (!r_.object(j, ptr, {"color", "width", "depth_offset", "halo"})) return std::nullopt;
    const std::size_t before = r_.count();
    style::BandSpec b;
    if (const json* c = r_.member(j, "color", ptr, true)) {
      if (auto col = band_color(*c, child(ptr, "color"))) b.color = std::move(*col);
    }
    if (const json* w = r_.member(j, "width", ptr, true)) {
      const std::string wp = child(ptr, "width");
      if (r_.object(*w, wp, {"min", "max", "attribute", "shape"})) {
        const auto mx = r_.number(*w, "max", wp, std::nullopt);
        const auto mn = r_.number(*w, "min", wp, 0.0);
        if (mn) b.w_min = *mn;
        if (mx) b.w_max = *mx;
        if (w->contains("attribute") && w->contains("shape")) {
          r_.fail(wp, "a width has at most one driver ('attribute' or 'shape')");
        } else if (w->contains("attribute")) {
          if (auto a = attribute((*w)["attribute"], child(wp, "attribute"))) b.driver = *a;
        } else if (w->contains("shape")) {
          if (auto s = shape((*w)["shape"], child(wp, "shape"))) b.driver = std::move(*s);
        }
      }
    }
    if (const auto d = r_.number(j, "depth_offset", ptr, 0.0)) b.depth_offset = *d;
    if (const auto h = r_.boolean(j, "halo", ptr, false)) b.is_halo = *h;
    if (r_.count() != before) return std::nullopt;
    return b;
  }

  std::optional<style::LineStyle> line_style(const json& j, const std::string& ptr) {
    if (!r_.object(j, ptr, {"id", "bands"})) return std::nullopt;
    const std::size_t before = r_.count();
    style::LineStyle s;
    if (auto id = r_.string(j, "id", ptr, std::nullopt)) s.id = *id;
    if (const json* bands = r_.member(j, "bands", ptr, true)) {
      if (!bands->is_array()) {
        r_.fail(child(ptr, "bands"), "expected an array of bands");
      } else {
        for (std::size_t i = 0; i < bands->size(); ++i) {
          if (auto b = band((*bands)[i], child(child(ptr, "bands"), i))) s.bands.push_back(*b);
        }
      }
    }
    if (r_.count() != before) return std::nullopt;
    for (const auto& issue : style::check_style(s)) r_.fail(ptr + issue.pointer, issue.message);
    if (r_.count() != before) return std::nullopt;
    return s;
  }

  std::optional<style::LineStyleTransferFunction> transfer_function(
      const json& j, const std::string& ptr, std::span<const style::LineStyle> styles) {
    if (!r_.object(j, ptr, {"attribute", "entries", "default"})) return std::nullopt;
    const std::size_t before = r_.count();
    style::LineStyleTransferFunction tf;
    if (const json* a = r_.member(j, "attribute", ptr, true)) {
      if (auto ref = attribute(*a, child(ptr, "attribute"))) tf.guiding = *ref;
    }
    if (auto d = r_.string(j, "default", ptr, std::nullopt)) tf.default_style = *d;
    if (const json* entries = r_.member(j, "entries", ptr, true)) {
      const std::string ep = child(ptr, "entries");
      if (!entries->is_array()) {
        r_.fail(ep, "expected an array of entries");
      } else {
        for (std::size_t i = 0; i < entries->size(); ++i) {
          const json& e = (*entries)[i];
          const std::string p = child(ep, i);
          if (!r_.object(e, p, {"range", "style"})) continue;
          style::TransferEntry entry;
          if (const json* range = r_.member(e, "range", p, true)) {
            if (auto lr = r_.numbers(*range, child(p, "range"), 2)) {
              entry.lo = (*lr)[0];
              entry.hi = (*lr)[1];
            }
          }
          if (auto s = r_.string(e, "style", p, std::nullopt)) entry.style_id = *s;
          tf.entries.push_back(std::move(entry));
        }
      }
    }
    if (r_.count() != before) return std::nullopt;
    for (const auto& issue : style::check_transfer_function(tf, styles))
      r_.fail(ptr + issue.pointer, issue.message);
    if (r_.count() != before) return std::nullopt;
    return tf;
  }

 private:
  Reader& r_;
  std::span<const std::string> channels_;
};

std::optional<style::StyleSet> read_styleset(Reader& r, const json& doc,
                                             std::span<const std::string> channels) {
  const std::size_t before = r.count();
  StyleReader sr(r, channels);
  std::vector<style::LineStyle> styles;
  if (const json* arr = r.member(doc, "styles", "", true)) {
    if (!arr->is_array() || arr->empty()) {
      r.fail("/styles", "expected a non-empty array of line styles");
    } else {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        if (auto s = sr.line_style((*arr)[i], child("/styles", i))) {
          for (const auto& prev : styles)
            if (prev.id == s->id) r.fail(child(child("/styles", i), "id"), "duplicate style id");
          styles.push_back(std::move(*s));
        }
      }
    }
  }
  std::optional<style::LineStyleTransferFunction> tf;
  if (const json* t = r.member(doc, "transfer_function", "", false); t && !t->is_null())
    tf = sr.transfer_function(*t, "/transfer_function", styles);
  std::string active;
  if (auto a = r.string(doc, "style", "", std::string())) {
    active = *a;
    if (!active.empty() &&
        std::none_of(styles.begin(), styles.end(),
                     [&](const style::LineStyle& s) { return s.id == active; }))
      r.fail("/style", "unknown style id '" + active + "'");
  }
  if (r.count() != before) return std::nullopt;
  try {
    return style::StyleSet(std::move(styles), std::move(tf), active);
  } catch (const StyleError& e) {
    r.fail("/styles", e.what());
    return std::nullopt;
  }
}

std::vector<std::string> dataset_channels(const DatasetSpec& spec, Reader& r,
                                          const std::string& ptr) {
  if (!spec.path) return {"speed", "temperature", "pressure"};
  try {
    return field::read_sfg_header(*spec.path).channels;
  } catch (const LoadError& e) {
    r.fail(child(ptr, "path"), e.what());
    return {};
  }
}

}  // namespace

json findings_to_json(std::span<const Finding> findings) {
  json arr = json::array();
  for (const auto& f : findings) arr.push_back({{"pointer", f.pointer}, {"message", f.message}});
  return arr;
}

geometry::Camera CameraSpec::make(int width, int height) const {
  return geometry::Camera(eye, look_at, up, fov_y,
                          static_cast<double>(width) / static_cast<double>(height), near, far);
}

std::optional<DatasetSpec> parse_dataset(const json& doc, const std::string& ptr,
                                         std::vector<Finding>& findings) {
  Reader r(findings);
  const std::size_t before = r.count();
  if (!r.object(doc, ptr, {"path", "analytic"})) return std::nullopt;
  DatasetSpec spec;
  const bool has_path = doc.contains("path");
  const bool has_analytic = doc.contains("analytic");
  if (has_path == has_analytic) {
    r.fail(ptr, "dataset needs exactly one of 'path' or 'analytic'");
    return std::nullopt;
  }
  if (has_path) {
    if (auto p = r.string(doc, "path", ptr, std::nullopt)) spec.path = *p;
  } else {
    const json& a = doc["analytic"];
    const std::string ap = child(ptr, "analytic");
    if (r.object(a, ap, {"kind", "dims", "params"})) {
      if (auto k = r.string(a, "kind", ap, std::nullopt)) {
        try {
          spec.kind = field::parse_analytic_kind(*k);
        } catch (const std::invalid_argument&) {
          r.fail(child(ap, "kind"), "unknown analytic field kind '" + *k + "'");
        }
      }
      if (const json* d = r.member(a, "dims", ap, false)) {
        if (auto dv = r.numbers(*d, child(ap, "dims"), 3)) {
          const auto& v = *dv;
          if (std::any_of(v.begin(), v.end(),
                          [](double x) { return x < 2 || x > 4096 || x != std::floor(x); }))
            r.fail(child(ap, "dims"), "dims must be integers in [2, 4096]");
          else
            spec.dims = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
        }
      }
      if (const json* p = r.member(a, "params", ap, false)) {
        const std::string pp = child(ap, "params");
        if (!p->is_object()) {
          r.fail(pp, "expected an object of numbers");
        } else {
          for (const auto& [k, v] : p->items()) {
            if (!v.is_number()) {
              r.fail(child(pp, k), "expected a number");
              continue;
            }
            spec.params[k] = v.get<double>();
          }
        }
      }
    }
  }
  if (r.count() != before) return std::nullopt;
  return spec;
}

std::optional<SeedConfig> parse_seeds(const json& doc, const std::string& ptr,
                                      std::vector<Finding>& findings) {
  Reader r(findings);
  const std::size_t before = r.count();
  if (!r.object(doc, ptr, {"strategy", "count", "dims", "region", "rng_seed"})) return std::nullopt;
  SeedConfig cfg;
  if (auto s = r.string(doc, "strategy", ptr, std::string("random"))) {
    if (*s == "random")
      cfg.spec.strategy = tracer::SeedStrategy::random;
    else if (*s == "uniform_grid")
      cfg.spec.strategy = tracer::SeedStrategy::uniform_grid;
    else
      r.fail(child(ptr, "strategy"), "strategy must be 'uniform_grid' or 'random'");
  }
  if (cfg.spec.strategy == tracer::SeedStrategy::random) {
    if (auto c = r.integer(doc, "count", ptr, std::nullopt, 1, 10'000'000))
      cfg.spec.count = static_cast<int>(*c);
  } else if (const json* d = r.member(doc, "dims", ptr, true)) {
    if (auto dv = r.numbers(*d, child(ptr, "dims"), 3)) {
      const auto& v = *dv;
      if (std::any_of(v.begin(), v.end(), [](double x) { return x < 1 || x != std::floor(x); }))
        r.fail(child(ptr, "dims"), "lattice dims must be integers >= 1");
      else
        cfg.spec.dims = {static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2])};
    }
  }
  if (auto s = r.integer(doc, "rng_seed", ptr, 0, 0, std::numeric_limits<long long>::max()))
    cfg.spec.rng_seed = static_cast<std::uint64_t>(*s);
  if (const json* reg = r.member(doc, "region", ptr, false)) {
    const std::string rp = child(ptr, "region");
    if (r.object(*reg, rp, {"min", "max"})) {
      const auto mn = r.vec3(*reg, "min", rp, std::nullopt);
      const auto mx = r.vec3(*reg, "max", rp, std::nullopt);
      if (mn && mx) {
        if (mn->x > mx->x || mn->y > mx->y || mn->z > mx->z)
          r.fail(rp, "region min must not exceed max");
        cfg.spec.region = {*mn, *mx};
        cfg.has_region = true;
      }
    }
  }
  if (r.count() != before) return std::nullopt;
  return cfg;
}

std::optional<tracer::TraceParams> parse_trace(const json& doc, const std::string& ptr,
                                               std::vector<Finding>& findings) {
  Reader r(findings);
  const std::size_t before = r.count();
  if (!r.object(doc, ptr, {"step", "max_steps", "max_time", "min_speed", "direction"}))
    return std::nullopt;
  tracer::TraceParams p;
  if (auto h = r.number(doc, "step", ptr, std::nullopt)) {
    if (!(*h > 0.0)) r.fail(child(ptr, "step"), "step must be > 0");
    p.step = *h;
  }
  if (auto n = r.integer(doc, "max_steps", ptr, std::nullopt, 1, 100'000'000))
    p.max_steps = static_cast<int>(*n);
  if (auto t = r.number(doc, "max_time", ptr, p.max_time)) {
    if (!(*t > 0.0)) r.fail(child(ptr, "max_time"), "max_time must be > 0");
    p.max_time = *t;
  }
  if (auto m = r.number(doc, "min_speed", ptr, p.min_speed)) {
    if (*m < 0.0) r.fail(child(ptr, "min_speed"), "min_speed must be >= 0");
    p.min_speed = *m;
  }
  if (auto d = r.string(doc, "direction", ptr, std::string("both"))) {
    if (*d == "forward")
      p.direction = tracer::Direction::forward;
    else if (*d == "backward")
      p.direction = tracer::Direction::backward;
    else if (*d == "both")
      p.direction = tracer::Direction::both;
    else
      r.fail(child(ptr, "direction"), "direction must be forward, backward or both");
  }
  if (r.count() != before) return std::nullopt;
  return p;
}

std::optional<CameraSpec> parse_camera(const json& doc, const std::string& ptr,
                                       std::vector<Finding>& findings) {
  Reader r(findings);
  const std::size_t before = r.count();
  if (!r.object(doc, ptr, {"eye", "look_at", "up", "fov_y", "near", "far"})) return std::nullopt;
  CameraSpec c;
  const auto eye = r.vec3(doc, "eye", ptr, std::nullopt);
  const auto at = r.vec3(doc, "look_at", ptr, Vec3{0, 0, 0});
  const auto up = r.vec3(doc, "up", ptr, Vec3{0, 1, 0});
  const auto fov = r.number(doc, "fov_y", ptr, 40.0);
  const auto nr = r.number(doc, "near", ptr, 0.05);
  const auto fr = r.number(doc, "far", ptr, 100.0);
  if (r.count() != before) return std::nullopt;
  c = {*eye, *at, *up, *fov, *nr, *fr};
  try {
    (void)c.make(1, 1);
  } catch (const std::invalid_argument& e) {
    r.fail(ptr, e.what());
    return std::nullopt;
  }
  return c;
}

StyleParseResult parse_styleset(const json& doc, std::span<const std::string> channels) {
  StyleParseResult res;
  Reader r(res.findings);
  if (!doc.is_object()) {
    r.fail("", "expected an object");
    return res;
  }
  res.styles = read_styleset(r, doc, channels);
  return res;
}

ParseResult parse_scene(const json& doc, const std::filesystem::path& base_dir) {
  ParseResult res;
  Reader r(res.findings);
  if (!r.object(doc, "",
                {"styleset_version", "dataset", "seeds", "trace", "styles", "style",
                 "transfer_function", "camera", "image", "global_scale", "output"}))
    return res;

  if (auto v = r.integer(doc, "styleset_version", "", std::nullopt, 0, 1000);
      v && *v != kStylesetVersion)
    r.fail("/styleset_version", "unsupported styleset_version (expected 1)");

  SceneConfig cfg;
  std::vector<std::string> channels;
  bool dataset_ok = false;
  if (const json* d = r.member(doc, "dataset", "", true)) {
    if (auto ds = parse_dataset(*d, "/dataset", res.findings)) {
      cfg.dataset = std::move(*ds);
      if (cfg.dataset.path && cfg.dataset.path->is_relative())
        cfg.dataset.path = base_dir / *cfg.dataset.path;
      const std::size_t before = r.count();
      channels = dataset_channels(cfg.dataset, r, "/dataset");
      dataset_ok = r.count() == before;
    }
  }
  if (const json* s = r.member(doc, "seeds", "", true)) {
    if (auto sc = parse_seeds(*s, "/seeds", res.findings)) cfg.seeds = *sc;
  }
  if (const json* t = r.member(doc, "trace", "", true)) {
    if (auto tp = parse_trace(*t, "/trace", res.findings)) cfg.trace = *tp;
  }
  if (dataset_ok) {
    if (auto styles = read_styleset(r, doc, channels)) cfg.styles = std::move(*styles);
  }
  if (const json* c = r.member(doc, "camera", "", true)) {
    if (auto cam = parse_camera(*c, "/camera", res.findings)) cfg.camera = *cam;
  }
  if (const json* im = r.member(doc, "image", "", true)) {
    if (r.object(*im, "/image", {"width", "height", "background"})) {
      if (auto w = r.integer(*im, "width", "/image", std::nullopt, 1, 16384))
        cfg.image.width = static_cast<int>(*w);
      if (auto h = r.integer(*im, "height", "/image", std::nullopt, 1, 16384))
        cfg.image.height = static_cast<int>(*h);
      if (const json* bg = r.member(*im, "background", "/image", false)) {
        if (auto v = r.numbers(*bg, "/image/background", 4)) {
          for (std::size_t i = 0; i < 4; ++i) {
            const double c = (*v)[i];
            if (c < 0 || c > 255 || c != std::floor(c))
              r.fail(child("/image/background", i), "expected an integer in [0, 255]");
            else
              cfg.image.background[i] = static_cast<std::uint8_t>(c);
          }
        }
      }
    }
  }
  if (auto g = r.number(doc, "global_scale", "", std::nullopt)) {
    if (!(*g > 0.0)) r.fail("/global_scale", "global_scale must be > 0");
    cfg.global_scale = *g;
  }
  if (auto o = r.string(doc, "output", "", std::string("out.png"))) cfg.output = *o;

  if (res.findings.empty()) res.config = std::move(cfg);
  return res;
}

ParseResult load_scene(const std::filesystem::path& config_path) {
  ParseResult res;
  std::ifstream in(config_path);
  if (!in) {
    res.findings.push_back({"", "cannot open '" + config_path.string() + "'"});
    return res;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    res.findings.push_back({"", std::string("JSON syntax error: ") + e.what()});
    return res;
  }
  return parse_scene(doc, config_path.parent_path());
}

}  // namespace streamstyle::scene
