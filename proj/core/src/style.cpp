// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/style.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "streamstyle/error.hpp"

namespace streamstyle::style {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Color lerp(const Color& a, const Color& b, double f) {
  return {a.r + (b.r - a.r) * f, a.g + (b.g - a.g) * f, a.b + (b.b - a.b) * f};
}

double mod1(double v) {
  double r = v - std::floor(v);
  // v slightly below an integer can round up to exactly 1.
  if (r >= 1.0) r = 0.0;
  return r;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

void check_phase(double phase, const std::string& ptr, std::vector<Issue>& out) {
  if (!(phase >= 0.0 && phase < 1.0)) out.push_back({ptr, "phase must lie in [0, 1)"});
}

void check_pattern(const DirectionalColorPattern& p, const std::string& ptr,
                   std::vector<Issue>& out) {
  if (!(p.length > 0.0) || !std::isfinite(p.length))
    out.push_back({ptr + "/length", "pattern length l must be > 0"});
  if (!(p.exponent > 0.0) || !std::isfinite(p.exponent))
    out.push_back({ptr + "/exponent", "slope shape exponent c must be > 0"});
  if (!in_unit(p.color_width))
    out.push_back({ptr + "/color_width", "relative color width w must lie in [0, 1]"});
  if (!std::isfinite(p.slope)) out.push_back({ptr + "/slope", "slope a must be finite"});
  check_phase(p.phase, ptr + "/phase", out);
}

}  // namespace

// ---------------------------------------------------------------------------

ColorMap::ColorMap(std::string name, std::vector<Stop> stops)
    : name_(std::move(name)), stops_(std::move(stops)) {
  if (stops_.size() < 2) throw StyleError("colormap '" + name_ + "' needs at least two stops");
  if (stops_.front().u != 0.0 || stops_.back().u != 1.0)
    throw StyleError("colormap '" + name_ + "' stops must span [0, 1]");
  for (std::size_t i = 1; i < stops_.size(); ++i)
    if (!(stops_[i].u > stops_[i - 1].u))
      throw StyleError("colormap '" + name_ + "' stop positions must strictly increase");
}

Color ColorMap::eval(double u) const {
  if (!(u > 0.0)) return stops_.front().color;
  if (u >= 1.0) return stops_.back().color;
  const auto it = std::upper_bound(stops_.begin(), stops_.end(), u,
                                   [](double v, const Stop& s) { return v < s.u; });
  const Stop& hi = *it;
  const Stop& lo = *(it - 1);
  return lerp(lo.color, hi.color, (u - lo.u) / (hi.u - lo.u));
}

const std::vector<ColorMap>& builtin_colormaps() {
  static const std::vector<ColorMap> maps = {
      ColorMap("grayscale", {{0.0, {0, 0, 0}}, {1.0, {1, 1, 1}}}),
      ColorMap("blue_purple",
               {{0.0, {0.62, 0.79, 0.88}}, {0.5, {0.42, 0.45, 0.78}}, {1.0, {0.33, 0.02, 0.47}}}),
      ColorMap("yellow_green",
               {{0.0, {1.0, 0.98, 0.55}}, {0.5, {0.6, 0.83, 0.33}}, {1.0, {0.1, 0.45, 0.2}}}),
      ColorMap("cool_warm",
               {{0.0, {0.23, 0.30, 0.75}}, {0.5, {0.87, 0.87, 0.87}}, {1.0, {0.71, 0.02, 0.15}}}),
      ColorMap("heat", {{0.0, {0.2, 0.0, 0.0}},
                        {0.35, {0.85, 0.15, 0.0}},
                        {0.7, {1.0, 0.8, 0.1}},
                        {1.0, {1.0, 1.0, 0.9}}}),
  };
  return maps;
}

const ColorMap* find_colormap(std::string_view name) {
  for (const auto& m : builtin_colormaps())
    if (m.name() == name) return &m;
  return nullptr;
}

// ---------------------------------------------------------------------------

AttributeTable::AttributeTable(std::vector<std::string> channel_names,
                               std::vector<field::ChannelRange> ranges,
                               field::ChannelRange t_range, field::ChannelRange s_range,
                               field::ChannelRange speed_range)
    : names_(std::move(channel_names)),
      ranges_(std::move(ranges)),
      t_range_(t_range),
      s_range_(s_range),
      speed_range_(speed_range) {
  if (names_.size() != ranges_.size())
    throw StyleError("attribute table: channel names and ranges differ in length");
}

bool AttributeTable::has(std::string_view name) const {
  if (name == "t" || name == "s" || name == "speed") return true;
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

AttributeRef resolve_attribute(std::span<const std::string> names, std::string_view name) {
  AttributeRef ref;
  ref.name = std::string(name);
  if (name == "t") {
    ref.kind = AttributeRef::Kind::t;
  } else if (name == "s") {
    ref.kind = AttributeRef::Kind::s;
  } else if (name == "speed") {
    ref.kind = AttributeRef::Kind::speed;
  } else {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw StyleError("unknown attribute '" + std::string(name) + "'");
    ref.kind = AttributeRef::Kind::channel;
    ref.channel = static_cast<std::size_t>(it - names.begin());
  }
  return ref;
}

double AttributeTable::normalized(const AttributeRef& ref, const LineSample& sample) const {
  switch (ref.kind) {
    case AttributeRef::Kind::t:
      return field::normalize(t_range_, sample.t);
    case AttributeRef::Kind::s:
      return field::normalize(s_range_, sample.s);
    case AttributeRef::Kind::speed:
      return field::normalize(speed_range_, sample.speed);
    case AttributeRef::Kind::channel:
      return field::normalize(ranges_[ref.channel], sample.channels[ref.channel]);
  }
  return 0.5;
}

// ---------------------------------------------------------------------------

std::string_view to_string(XSource x) {
  return x == XSource::arc_length ? "arc_length" : "integration_time";
}

std::optional<XSource> parse_x_source(std::string_view name) {
  if (name == "arc_length") return XSource::arc_length;
  if (name == "integration_time") return XSource::integration_time;
  return std::nullopt;
}

ShapeMappingFunction::ShapeMappingFunction(std::vector<Point> points, std::string preset)
    : points_(std::move(points)), preset_(std::move(preset)) {
  if (points_.size() < 2) throw StyleError("shape mapping function needs at least two points");
  if (points_.front().s != 0.0 || points_.back().s != 1.0)
    throw StyleError("shape mapping function must span s in [0, 1]");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!in_unit(points_[i].w)) throw StyleError("shape mapping widths must lie in [0, 1]");
    if (i > 0 && !(points_[i].s > points_[i - 1].s))
      throw StyleError("shape mapping control points must strictly increase in s");
  }
}

namespace {
constexpr std::array<std::string_view, 5> kPresetNames = {"constant", "dash", "triangle_arrow",
                                                          "droplet", "tadpole"};
}

std::span<const std::string_view> ShapeMappingFunction::preset_names() { return kPresetNames; }

std::optional<ShapeMappingFunction> ShapeMappingFunction::preset(std::string_view name) {
  using P = std::vector<Point>;
  P pts;
  if (name == "constant") {
    pts = {{0.0, 1.0}, {1.0, 1.0}};
  } else if (name == "dash") {
    pts = {{0.0, 1.0}, {0.5, 1.0}, {0.51, 0.0}, {0.99, 0.0}, {1.0, 1.0}};
  } else if (name == "triangle_arrow") {
    // Short tail taper, shaft, then a head that narrows to the tip at s = 1 so
    // arrows point toward increasing x.
    pts = {{0.0, 0.0}, {0.04, 0.3}, {0.55, 0.3}, {0.56, 1.0}, {1.0, 0.0}};
  } else if (name == "droplet") {
    pts = {{0.0, 0.0}, {0.3, 0.25}, {0.6, 0.6}, {0.8, 0.9}, {0.92, 0.85}, {1.0, 0.0}};
  } else if (name == "tadpole") {
    pts = {{0.0, 0.0}, {0.4, 0.12}, {0.55, 0.35}, {0.65, 0.85},
           {0.78, 1.0}, {0.9, 0.8},  {0.97, 0.4},  {1.0, 0.0}};
  } else {
    return std::nullopt;
  }
  return ShapeMappingFunction(std::move(pts), std::string(name));
}

double ShapeMappingFunction::eval(double s) const {
  if (!(s > 0.0)) return points_.front().w;
  if (s >= 1.0) return points_.back().w;
  const auto it = std::upper_bound(points_.begin(), points_.end(), s,
                                   [](double v, const Point& p) { return v < p.s; });
  const Point& hi = *it;
  const Point& lo = *(it - 1);
  return lo.w + (hi.w - lo.w) * ((s - lo.s) / (hi.s - lo.s));
}

// ---------------------------------------------------------------------------

double eval_shape_attribute(double x, double l, double phase) { return mod1(x / l + phase); }

double eval_band_width(const BandSpec& band, double shape_attribute, double norm_attr) {
  return std::visit(
      overloaded{
          [&](const std::monostate&) { return band.w_max; },
          [&](const AttributeRef&) { return band.w_min + (band.w_max - band.w_min) * norm_attr; },
          [&](const ShapePattern& p) {
            return band.w_min + (band.w_max - band.w_min) * p.mapping.eval(shape_attribute);
          },
      },
      band.driver);
}

double current_band_width(const BandSpec& band, const AttributeTable& table,
                          const LineSample& sample) {
  return std::visit(
      overloaded{
          [&](const std::monostate&) { return band.w_max; },
          [&](const AttributeRef& a) {
            return eval_band_width(band, 0.0, table.normalized(a, sample));
          },
          [&](const ShapePattern& p) {
            return eval_band_width(
                band, eval_shape_attribute(x_value(p.x_source, sample), p.length, p.phase), 0.0);
          },
      },
      band.driver);
}

double directional_decision(const DirectionalColorPattern& p, double x, double b) {
  return mod1(x / p.length + p.phase + p.slope * std::pow(b, p.exponent)) - p.color_width;
}

Selector eval_directional_pattern(const DirectionalColorPattern& p, double x, double b) {
  return directional_decision(p, x, b) < 0.0 ? Selector::A : Selector::B;
}

Color resolve_color(const BaseColorSource& src, const AttributeTable& table,
                    const LineSample& sample) {
  return std::visit(overloaded{
                        [](const Color& c) { return c; },
                        [&](const MappedColor& m) {
                          return m.map.eval(table.normalized(m.attribute, sample));
                        },
                    },
                    src);
}

Color resolve_color(const BandColorSource& src, const AttributeTable& table,
                    const LineSample& sample, double b) {
  return std::visit(
      overloaded{
          [](const Color& c) { return c; },
          [&](const MappedColor& m) { return m.map.eval(table.normalized(m.attribute, sample)); },
          [&](const PatternColor& pc) {
            const auto& p = pc.pattern;
            const Selector sel = eval_directional_pattern(p, x_value(p.x_source, sample), b);
            return resolve_color(sel == Selector::A ? p.color_a : p.color_b, table, sample);
          },
      },
      src);
}

double style_total_width(const LineStyle& style) {
  double total = 0.0;
  for (const auto& band : style.bands) total += band.w_max;
  return total;
}

std::size_t select_style(const LineStyleTransferFunction& tf, double norm_guiding) {
  for (const auto& e : tf.entries) {
    if (norm_guiding >= e.lo && (norm_guiding < e.hi || (e.hi >= 1.0 && norm_guiding == 1.0)))
      return e.style_index;
  }
  return tf.default_index;
}

// ---------------------------------------------------------------------------

std::vector<Issue> check_style(const LineStyle& style) {
  std::vector<Issue> out;
  if (style.id.empty()) out.push_back({"/id", "style id must be non-empty"});
  if (style.bands.empty()) out.push_back({"/bands", "a line style needs at least one band"});
  for (std::size_t i = 0; i < style.bands.size(); ++i) {
    const BandSpec& b = style.bands[i];
    const std::string ptr = "/bands/" + std::to_string(i);
    if (!in_unit(b.w_min)) out.push_back({ptr + "/width/min", "w_min must lie in [0, 1]"});
    if (!in_unit(b.w_max)) out.push_back({ptr + "/width/max", "w_max must lie in [0, 1]"});
    if (!(b.w_max > 0.0)) out.push_back({ptr + "/width/max", "w_max must be > 0"});
    if (b.w_min > b.w_max) out.push_back({ptr + "/width", "w_min must not exceed w_max"});
    if (!(b.depth_offset >= 0.0) || !std::isfinite(b.depth_offset))
      out.push_back({ptr + "/depth_offset", "depth offset must be finite and >= 0"});
    if (const auto* sp = std::get_if<ShapePattern>(&b.driver)) {
      if (!(sp->length > 0.0) || !std::isfinite(sp->length))
        out.push_back({ptr + "/width/shape/length", "shape pattern length l must be > 0"});
      check_phase(sp->phase, ptr + "/width/shape/phase", out);
    }
    if (const auto* pc = std::get_if<PatternColor>(&b.color))
      check_pattern(pc->pattern, ptr + "/color/pattern", out);
  }
  return out;
}

std::vector<Issue> check_transfer_function(const LineStyleTransferFunction& tf,
                                           std::span<const LineStyle> styles) {
  std::vector<Issue> out;
  auto known = [&](const std::string& id) {
    return std::any_of(styles.begin(), styles.end(),
                       [&](const LineStyle& s) { return s.id == id; });
  };
  for (std::size_t i = 0; i < tf.entries.size(); ++i) {
    const auto& e = tf.entries[i];
    const std::string ptr = "/entries/" + std::to_string(i);
    if (!(e.lo < e.hi)) out.push_back({ptr + "/range", "range needs lo < hi"});
    if (!known(e.style_id)) out.push_back({ptr, "unknown style id '" + e.style_id + "'"});
  }
  if (!known(tf.default_style))
    out.push_back({"/default", "unknown default style id '" + tf.default_style + "'"});

  std::vector<std::size_t> order(tf.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return tf.entries[a].lo < tf.entries[b].lo; });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = tf.entries[order[k - 1]];
    const auto& cur = tf.entries[order[k]];
    if (cur.lo < prev.hi) {
      out.push_back({"/entries/" + std::to_string(order[k]) + "/range",
                     "range overlaps entry " + std::to_string(order[k - 1])});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

StyleSet::StyleSet(std::vector<LineStyle> styles, std::optional<LineStyleTransferFunction> tf,
                   std::string active_style)
    : styles_(std::move(styles)), tf_(std::move(tf)) {
  if (styles_.empty()) throw StyleError("a style set needs at least one style");
  for (std::size_t i = 0; i < styles_.size(); ++i) {
    const auto issues = check_style(styles_[i]);
    if (!issues.empty())
      throw StyleError("style '" + styles_[i].id + "'" + issues.front().pointer + ": " +
                       issues.front().message);
    for (std::size_t j = 0; j < i; ++j)
      if (styles_[j].id == styles_[i].id)
        throw StyleError("duplicate style id '" + styles_[i].id + "'");
  }
  if (tf_) {
    const auto issues = check_transfer_function(*tf_, styles_);
    if (!issues.empty())
      throw StyleError("transfer function" + issues.front().pointer + ": " +
                       issues.front().message);
    for (auto& e : tf_->entries) e.style_index = *index_of(e.style_id);
    tf_->default_index = *index_of(tf_->default_style);
  }
  if (!active_style.empty()) {
    const auto idx = index_of(active_style);
    if (!idx) throw StyleError("unknown style id '" + active_style + "'");
    active_ = *idx;
  }
}

std::optional<std::size_t> StyleSet::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < styles_.size(); ++i)
    if (styles_[i].id == id) return i;
  return std::nullopt;
}

std::size_t StyleSet::select(const AttributeTable& table, const LineSample& sample) const {
  if (!tf_) return active_;
  return select_style(*tf_, table.normalized(tf_->guiding, sample));
}

double StyleSet::strip_total_width() const {
  if (!tf_) return style_total_width(styles_[active_]);
  double w = style_total_width(styles_[tf_->default_index]);
  for (const auto& e : tf_->entries) w = std::max(w, style_total_width(styles_[e.style_index]));
  return w;
}

StyleSet StyleSet::with_phase(double phase) const {
  StyleSet copy = *this;
  for (auto& s : copy.styles_) {
    for (auto& b : s.bands) {
      if (auto* sp = std::get_if<ShapePattern>(&b.driver)) sp->phase = phase;
      if (auto* pc = std::get_if<PatternColor>(&b.color)) pc->pattern.phase = phase;
    }
  }
  return copy;
}

}  // namespace streamstyle::style
