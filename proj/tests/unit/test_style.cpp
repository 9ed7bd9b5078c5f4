// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "streamstyle/error.hpp"
#include "streamstyle/raster.hpp"
#include "streamstyle/style.hpp"

namespace ss = streamstyle;
namespace st = ss::style;

namespace {

// Mathematical modulo by repeated integer shifting, no floor().
double mod1_ref(double v) {
  double r = std::fmod(v, 1.0);
  if (r < 0) r += 1.0;
  if (r >= 1.0) r -= 1.0;
  return r;
}

st::BandSpec band(double w_max, double w_min = 0.0) {
  st::BandSpec b;
  b.w_min = w_min;
  b.w_max = w_max;
  return b;
}

st::AttributeTable table_with(const std::string& name, double lo, double hi) {
  return st::AttributeTable({name}, {{lo, hi}}, {0, 1}, {0, 1}, {0, 1});
}

st::LineStyle style_of(std::string id, std::vector<st::BandSpec> bands) {
  return {std::move(id), std::move(bands)};
}

}  // namespace

TEST(ShapeAttribute, Examples) {
  EXPECT_EQ(st::eval_shape_attribute(0.0, 5.0, 0.0), 0.0);
  EXPECT_NEAR(st::eval_shape_attribute(2.3, 2.0, 0.0), 0.15, 1e-15);
  EXPECT_EQ(st::eval_shape_attribute(-0.25, 1.0, 0.0), 0.75);
}

TEST(ShapeAttribute, RangeAndPeriodicity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ux(-100, 100), ul(0.01, 10), up(0, 1);
  for (int i = 0; i < 5000; ++i) {
    const double x = ux(rng), l = ul(rng), ph = up(rng);
    const double s = st::eval_shape_attribute(x, l, ph);
    ASSERT_GE(s, 0.0);
    ASSERT_LT(s, 1.0);
    ASSERT_NEAR(s, mod1_ref(x / l + ph), 1e-12);
  }
  // Integer multiples map to zero, not to one.
  EXPECT_EQ(st::eval_shape_attribute(3.0, 1.0, 0.0), 0.0);
  EXPECT_EQ(st::eval_shape_attribute(-3.0, 1.0, 0.0), 0.0);
}

TEST(BandWidth, Examples) {
  EXPECT_EQ(st::eval_band_width(band(0.8), 0.3, 0.7), 0.8);
  auto attr = band(1.0, 0.2);
  attr.driver = st::AttributeRef{"speed", st::AttributeRef::Kind::speed, 0};
  EXPECT_DOUBLE_EQ(st::eval_band_width(attr, 0.0, 0.5), 0.6);
  auto shape = band(0.9, 0.1);
  shape.driver = st::ShapePattern{st::XSource::arc_length, 1.0,
                                  *st::ShapeMappingFunction::preset("triangle_arrow"), 0.0};
  EXPECT_EQ(st::eval_band_width(shape, 0.0, 0.0), 0.1);
}

TEST(BandWidth, StaysWithinLimits) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto name : st::ShapeMappingFunction::preset_names()) {
    auto b = band(0.9, 0.2);
    b.driver = st::ShapePattern{st::XSource::arc_length, 0.5,
                                *st::ShapeMappingFunction::preset(name), 0.0};
    for (int i = 0; i < 500; ++i) {
      const double w = st::eval_band_width(b, u(rng), 0.0);
      ASSERT_GE(w, 0.2);
      ASSERT_LE(w, 0.9);
    }
  }
}

TEST(ShapeMapping, PresetsAreValid) {
  ASSERT_EQ(st::ShapeMappingFunction::preset_names().size(), 5u);
  for (const auto name : st::ShapeMappingFunction::preset_names()) {
    const auto fn = st::ShapeMappingFunction::preset(name);
    ASSERT_TRUE(fn) << name;
    EXPECT_LE(fn->points().size(), 8u);
    EXPECT_EQ(fn->preset_name(), name);
  }
  EXPECT_FALSE(st::ShapeMappingFunction::preset("spiral"));
  const auto dash = *st::ShapeMappingFunction::preset("dash");
  EXPECT_EQ(dash.eval(0.25), 1.0);
  EXPECT_EQ(dash.eval(0.75), 0.0);
}

TEST(ShapeMapping, RejectsBadPolygons) {
  using P = st::ShapeMappingFunction::Point;
  EXPECT_THROW(st::ShapeMappingFunction({{0.0, 1.0}}), ss::StyleError);
  EXPECT_THROW(st::ShapeMappingFunction({P{0.1, 1.0}, P{1.0, 1.0}}), ss::StyleError);
  EXPECT_THROW(st::ShapeMappingFunction({P{0.0, 1.0}, P{0.5, 1.0}, P{0.5, 0.0}, P{1.0, 1.0}}),
               ss::StyleError);
  EXPECT_THROW(st::ShapeMappingFunction({P{0.0, 1.5}, P{1.0, 1.0}}), ss::StyleError);
}

TEST(DirectionalPattern, Examples) {
  st::DirectionalColorPattern p;
  p.length = 1.0;
  p.color_width = 0.5;
  p.slope = 3.7;
  p.exponent = 2.2;
  EXPECT_EQ(st::directional_decision(p, 0.0, 0.0), -0.5);
  EXPECT_EQ(st::eval_directional_pattern(p, 0.0, 0.0), st::Selector::A);

  p.slope = 0.5;
  p.exponent = 1.0;
  EXPECT_NEAR(st::directional_decision(p, 0.2, 1.0), 0.2, 1e-15);
  EXPECT_EQ(st::eval_directional_pattern(p, 0.2, 1.0), st::Selector::B);

  p.slope = 0.4;
  p.exponent = 2.0;
  p.color_width = 0.3;
  const st::Selector want[] = {st::Selector::A, st::Selector::A, st::Selector::A, st::Selector::A,
                               st::Selector::B};
  for (int i = 0; i < 5; ++i)
    EXPECT_EQ(st::eval_directional_pattern(p, 0.0, 0.25 * i), want[i]) << "b=" << 0.25 * i;
}

TEST(DirectionalPattern, WidthExtremes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0, 1), ux(-50, 50), ua(-4, 4), uc(0.1, 5);
  st::DirectionalColorPattern p;
  for (int i = 0; i < 2000; ++i) {
    p.length = 0.05 + u(rng) * 3;
    p.slope = ua(rng);
    p.exponent = uc(rng);
    p.phase = u(rng) * 0.999;
    const double x = ux(rng), b = u(rng);
    p.color_width = 0.0;
    ASSERT_EQ(st::eval_directional_pattern(p, x, b), st::Selector::B);
    p.color_width = 1.0;
    ASSERT_EQ(st::eval_directional_pattern(p, x, b), st::Selector::A);
  }
}

TEST(ColorSource, Examples) {
  const st::AttributeTable table = table_with("temperature", 0.0, 10.0);
  const std::vector<double> ch{5.0};
  st::LineSample sample{0.2, 0.2, 1.0, ch};
  EXPECT_EQ(st::resolve_color(st::BandColorSource{st::Color{0, 0, 0}}, table, sample, 0.3),
            (st::Color{0, 0, 0}));

  const auto mapped = st::MappedColor{*st::find_colormap("grayscale"), table.resolve("temperature")};
  const auto c = st::resolve_color(st::BandColorSource{mapped}, table, sample, 0.0);
  EXPECT_EQ(ss::raster::to_rgba8(c), (ss::raster::Rgba8{128, 128, 128, 255}));

  st::DirectionalColorPattern p;
  p.length = 1.0;
  p.slope = 0.5;
  p.exponent = 1.0;
  p.color_width = 0.5;
  p.color_a = st::Color{1, 1, 1};
  p.color_b = st::Color{0, 0, 0};
  EXPECT_EQ(st::resolve_color(st::BandColorSource{st::PatternColor{p}}, table, sample, 1.0),
            (st::Color{0, 0, 0}));
  EXPECT_EQ(st::resolve_color(st::BandColorSource{st::PatternColor{p}}, table, sample, 0.0),
            (st::Color{1, 1, 1}));
}

TEST(ColorMap, BuiltinsAndInterpolation) {
  for (const char* name : {"grayscale", "blue_purple", "yellow_green"})
    EXPECT_NE(st::find_colormap(name), nullptr) << name;
  EXPECT_EQ(st::find_colormap("viridis_nonexistent"), nullptr);
  const st::ColorMap m("m", {{0.0, {0, 0, 0}}, {0.25, {1, 0, 0}}, {1.0, {1, 1, 1}}});
  EXPECT_EQ(m.eval(-1.0), (st::Color{0, 0, 0}));
  EXPECT_EQ(m.eval(2.0), (st::Color{1, 1, 1}));
  EXPECT_DOUBLE_EQ(m.eval(0.125).r, 0.5);
  EXPECT_DOUBLE_EQ(m.eval(0.625).g, 0.5);
  EXPECT_THROW(st::ColorMap("bad", {{0.0, {}}, {0.9, {}}}), ss::StyleError);
}

TEST(Attributes, BuiltinsShadowChannels) {
  const std::vector<std::string> names{"speed", "temperature"};
  EXPECT_EQ(st::resolve_attribute(names, "speed").kind, st::AttributeRef::Kind::speed);
  EXPECT_EQ(st::resolve_attribute(names, "s").kind, st::AttributeRef::Kind::s);
  const auto t = st::resolve_attribute(names, "temperature");
  EXPECT_EQ(t.kind, st::AttributeRef::Kind::channel);
  EXPECT_EQ(t.channel, 1u);
  EXPECT_THROW(st::resolve_attribute(names, "vorticity"), ss::StyleError);
}

TEST(TransferFunction, Examples) {
  st::LineStyleTransferFunction tf;
  tf.entries = {{0.0, 0.5, "A", 0}, {0.5, 1.0, "B", 1}};
  tf.default_index = 2;
  EXPECT_EQ(st::select_style(tf, 0.3), 0u);
  EXPECT_EQ(st::select_style(tf, 0.5), 1u);
  EXPECT_EQ(st::select_style(tf, 1.0), 1u);
  tf.entries = {{0.0, 0.2, "A", 0}};
  EXPECT_EQ(st::select_style(tf, 0.7), 2u);
  EXPECT_EQ(st::select_style(tf, 0.2), 2u);
}

TEST(TransferFunction, FindingsForBadEntries) {
  const std::vector<st::LineStyle> styles{style_of("A", {band(0.5)}), style_of("B", {band(0.5)})};
  st::LineStyleTransferFunction tf;
  tf.entries = {{0.0, 0.6, "A", 0}, {0.5, 1.0, "B", 0}};
  tf.default_style = "A";
  auto issues = st::check_transfer_function(tf, styles);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].pointer, "/entries/1/range");
  EXPECT_NE(issues[0].message.find("overlap"), std::string::npos);

  tf.entries = {{0.0, 0.5, "X", 0}};
  issues = st::check_transfer_function(tf, styles);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].pointer, "/entries/0");

  tf.entries = {{0.5, 0.5, "A", 0}};
  tf.default_style = "Q";
  EXPECT_EQ(st::check_transfer_function(tf, styles).size(), 2u);
}

TEST(StyleWidth, Sums) {
  EXPECT_DOUBLE_EQ(st::style_total_width(style_of("a", {band(1.0), band(0.25)})), 1.25);
  EXPECT_DOUBLE_EQ(st::style_total_width(style_of("a", {band(0.8)})), 0.8);
  EXPECT_DOUBLE_EQ(st::style_total_width(style_of("a", {band(0.5), band(0.3), band(0.2)})), 1.0);
}

TEST(StyleCheck, InvariantFindings) {
  auto s = style_of("s", {band(0.5, 0.6)});
  auto issues = st::check_style(s);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].pointer, "/bands/0/width");

  st::DirectionalColorPattern p;
  p.exponent = 0.0;
  auto b = band(0.5);
  b.color = st::PatternColor{p};
  issues = st::check_style(style_of("s", {b}));
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].pointer, "/bands/0/color/pattern/exponent");
  EXPECT_NE(issues[0].message.find("c must be > 0"), std::string::npos);

  b = band(1.5);
  b.depth_offset = -1.0;
  EXPECT_EQ(st::check_style(style_of("s", {b})).size(), 2u);
  EXPECT_EQ(st::check_style(style_of("", {})).size(), 2u);
}

TEST(StyleSet, StripWidthIsMaxOverSelectable) {
  const std::vector<st::LineStyle> styles{style_of("thin", {band(0.2)}),
                                          style_of("wide", {band(0.7), band(0.3)}),
                                          style_of("unused", {band(0.9), band(0.9)})};
  st::LineStyleTransferFunction tf;
  tf.guiding = {"s", st::AttributeRef::Kind::s, 0};
  tf.entries = {{0.0, 0.5, "wide", 0}};
  tf.default_style = "thin";
  const st::StyleSet set(styles, tf);
  EXPECT_DOUBLE_EQ(set.strip_total_width(), 1.0);
  EXPECT_EQ(*set.index_of("wide"), 1u);

  const st::AttributeTable table({}, {}, {0, 1}, {0, 10}, {0, 1});
  EXPECT_EQ(set.select(table, {0.0, 2.0, 0.0, {}}), 1u);
  EXPECT_EQ(set.select(table, {0.0, 7.0, 0.0, {}}), 0u);

  const st::StyleSet single(styles, std::nullopt, "unused");
  EXPECT_DOUBLE_EQ(single.strip_total_width(), 1.8);
  EXPECT_THROW(st::StyleSet(styles, std::nullopt, "nope"), ss::StyleError);
}

TEST(StyleSet, PhaseOverride) {
  auto b = band(0.5);
  b.driver = st::ShapePattern{st::XSource::arc_length, 1.0, *st::ShapeMappingFunction::preset("dash"),
                              0.0};
  const st::StyleSet set({style_of("d", {b})}, std::nullopt);
  const auto shifted = set.with_phase(0.25);
  EXPECT_EQ(std::get<st::ShapePattern>(shifted.styles()[0].bands[0].driver).phase, 0.25);
  EXPECT_EQ(std::get<st::ShapePattern>(set.styles()[0].bands[0].driver).phase, 0.0);
}
