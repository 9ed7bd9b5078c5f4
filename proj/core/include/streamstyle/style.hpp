// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "streamstyle/field.hpp"

// Band-based illustrative line styles.
//
// A line is drawn as a strip split into bands mirrored around its centerline.
// Each band has a color source, a width (possibly driven by an attribute or a
// repeating shape pattern) and an optional depth offset that turns it into a
// depth-dependent halo. Transfer functions pick a whole style per line region
// from a guiding attribute.
namespace streamstyle::style {

struct Color {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
  friend bool operator==(const Color&, const Color&) = default;
};

// Piecewise-linear RGB map over [0, 1].
class ColorMap {
 public:
  struct Stop {
    double u;
    Color color;
  };

  ColorMap() = default;
  // Throws StyleError unless stops start at 0, end at 1 and strictly increase.
  ColorMap(std::string name, std::vector<Stop> stops);

  const std::string& name() const { return name_; }
  const std::vector<Stop>& stops() const { return stops_; }
  // u is clamped to [0, 1].
  Color eval(double u) const;

 private:
  std::string name_;
  std::vector<Stop> stops_;
};

// grayscale, blue_purple, yellow_green, plus a few general-purpose maps.
const std::vector<ColorMap>& builtin_colormaps();
const ColorMap* find_colormap(std::string_view name);

// ---------------------------------------------------------------------------
// Attributes

struct AttributeRef {
  enum class Kind { channel, t, s, speed };
  std::string name;
  Kind kind = Kind::channel;
  std::size_t channel = 0;
};

// Attribute values at one point on a line, raw units. `channels` is indexed
// like the grid channels.
struct LineSample {
  double t = 0.0;
  double s = 0.0;
  double speed = 0.0;
  std::span<const double> channels;
};

// "t", "s" and "speed" name the built-ins (a grid channel called "speed" is
// shadowed); every other name must be a channel. Throws StyleError.
AttributeRef resolve_attribute(std::span<const std::string> channel_names, std::string_view name);

/// Binds attribute names and normalizes raw values.
///
/// Channel ranges come from the grid (dataset-global). The built-ins t, s and
/// speed use the ranges observed over the traced line set.
class AttributeTable {
 public:
  AttributeTable() = default;
  AttributeTable(std::vector<std::string> channel_names, std::vector<field::ChannelRange> ranges,
                 field::ChannelRange t_range, field::ChannelRange s_range,
                 field::ChannelRange speed_range);

  AttributeRef resolve(std::string_view name) const { return resolve_attribute(names_, name); }
  bool has(std::string_view name) const;
  double normalized(const AttributeRef& ref, const LineSample& sample) const;

  const std::vector<std::string>& channel_names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::vector<field::ChannelRange> ranges_;
  field::ChannelRange t_range_;
  field::ChannelRange s_range_;
  field::ChannelRange speed_range_;
};

// ---------------------------------------------------------------------------
// Shapes and patterns

enum class XSource { arc_length, integration_time };

std::string_view to_string(XSource x);
std::optional<XSource> parse_x_source(std::string_view name);
inline double x_value(XSource x, const LineSample& sample) {
  return x == XSource::arc_length ? sample.s : sample.t;
}

// Piecewise-linear map [0, 1] -> [0, 1] from the repeating shape attribute to
// a relative band width.
class ShapeMappingFunction {
 public:
  struct Point {
    double s;
    double w;
  };

  ShapeMappingFunction() : ShapeMappingFunction({{0.0, 1.0}, {1.0, 1.0}}) {}
  // Throws StyleError unless s strictly increases from 0 to 1 and w in [0, 1].
  explicit ShapeMappingFunction(std::vector<Point> points, std::string preset = {});

  // Presets: constant, dash, triangle_arrow, droplet, tadpole. Approximations
  // of the classic shapes, at most 8 control points each.
  static std::optional<ShapeMappingFunction> preset(std::string_view name);
  static std::span<const std::string_view> preset_names();

  double eval(double s) const;
  const std::vector<Point>& points() const { return points_; }
  // Preset name, empty for custom polygons.
  const std::string& preset_name() const { return preset_; }

 private:
  std::vector<Point> points_;
  std::string preset_;
};

struct ShapePattern {
  XSource x_source = XSource::arc_length;
  double length = 1.0;
  ShapeMappingFunction mapping;
  double phase = 0.0;
};

struct MappedColor {
  ColorMap map;
  AttributeRef attribute;
};

// Color sources allowed inside a directional pattern.
using BaseColorSource = std::variant<Color, MappedColor>;

struct DirectionalColorPattern {
  XSource x_source = XSource::arc_length;
  double length = 1.0;       // l
  double slope = 0.0;        // a
  double exponent = 1.0;     // c, > 0
  double color_width = 0.5;  // w, in [0, 1]
  double phase = 0.0;
  BaseColorSource color_a = Color{1, 1, 1};
  BaseColorSource color_b = Color{0, 0, 0};
};

struct PatternColor {
  DirectionalColorPattern pattern;
};

using BandColorSource = std::variant<Color, MappedColor, PatternColor>;
using WidthDriver = std::variant<std::monostate, AttributeRef, ShapePattern>;

struct BandSpec {
  BandColorSource color = Color{1, 1, 1};
  double w_min = 0.0;
  double w_max = 1.0;
  WidthDriver driver;
  // World units; only meaningful for halo bands.
  double depth_offset = 0.0;
  bool is_halo = false;
};

// Bands ordered from the centerline outward; mirrored to both sides.
struct LineStyle {
  std::string id;
  std::vector<BandSpec> bands;
};

struct TransferEntry {
  double lo = 0.0;
  double hi = 1.0;
  std::string style_id;
  std::size_t style_index = 0;
};

struct LineStyleTransferFunction {
  AttributeRef guiding;
  std::vector<TransferEntry> entries;
  std::string default_style;
  std::size_t default_index = 0;
};

// ---------------------------------------------------------------------------
// Evaluation

// (x / l + phase) mod 1 with a non-negative result in [0, 1).
double eval_shape_attribute(double x, double l, double phase);

// w_max, or w_min + (w_max - w_min) * driver value.
double eval_band_width(const BandSpec& band, double shape_attribute, double norm_attr);

// Band width at a point on a line, evaluating whichever driver the band has.
double current_band_width(const BandSpec& band, const AttributeTable& table,
                          const LineSample& sample);

enum class Selector { A, B };

// ((x / l + phase + a * b^c) mod 1) - w
double directional_decision(const DirectionalColorPattern& p, double x, double b);
// A when the decision value is negative, otherwise B.
Selector eval_directional_pattern(const DirectionalColorPattern& p, double x, double b);

Color resolve_color(const BaseColorSource& src, const AttributeTable& table,
                    const LineSample& sample);
// b is the lateral position within the band, [0, 1] from its inner edge.
Color resolve_color(const BandColorSource& src, const AttributeTable& table,
                    const LineSample& sample, double b);

// Sum of w_max over the bands (one side of the strip).
double style_total_width(const LineStyle& style);

// First entry containing the value, else the default. Ranges are [lo, hi);
// an entry whose hi >= 1 also contains 1.
std::size_t select_style(const LineStyleTransferFunction& tf, double norm_guiding);

// ---------------------------------------------------------------------------
// Style sets

/// The styles of a scene plus the rule choosing among them: either a transfer
/// function or a single active style.
class StyleSet {
 public:
  StyleSet() = default;
  // Throws StyleError if ids are not unique/resolvable or any invariant fails.
  StyleSet(std::vector<LineStyle> styles, std::optional<LineStyleTransferFunction> tf,
           std::string active_style = {});

  const std::vector<LineStyle>& styles() const { return styles_; }
  const std::optional<LineStyleTransferFunction>& transfer_function() const { return tf_; }
  std::size_t active_index() const { return active_; }
  std::optional<std::size_t> index_of(std::string_view id) const;

  std::size_t select(const AttributeTable& table, const LineSample& sample) const;
  // Max style_total_width over every style the selection can produce.
  double strip_total_width() const;

  // Overrides the phase of every shape and directional pattern.
  StyleSet with_phase(double phase) const;

 private:
  std::vector<LineStyle> styles_;
  std::optional<LineStyleTransferFunction> tf_;
  std::size_t active_ = 0;
};

// Invariant check. Issues carry a JSON-pointer suffix relative to the object
// checked, e.g. "/bands/1/width/max".
struct Issue {
  std::string pointer;
  std::string message;
};

std::vector<Issue> check_style(const LineStyle& style);
std::vector<Issue> check_transfer_function(const LineStyleTransferFunction& tf,
                                           std::span<const LineStyle> styles);

}  // namespace streamstyle::style
