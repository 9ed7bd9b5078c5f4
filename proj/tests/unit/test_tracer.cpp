// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "streamstyle/error.hpp"
#include "streamstyle/tracer.hpp"

namespace ss = streamstyle;
using ss::Vec3;
using ss::field::AnalyticKind;
using ss::tracer::Direction;
using ss::tracer::TraceParams;

namespace {

ss::field::VectorFieldGrid field(AnalyticKind kind, int n, double lo, double hi) {
  return ss::field::gen_analytic_field(kind, {n, n, n}, {{"lo", lo}, {"hi", hi}});
}

TraceParams forward(double h, int steps) {
  TraceParams p;
  p.step = h;
  p.max_steps = steps;
  p.direction = Direction::forward;
  return p;
}

double circle_error(double h) {
  // Nodes at multiples of 0.25 keep the linear field exact in float32.
  const auto g = field(AnalyticKind::circular, 17, -2.0, 2.0);
  auto p = forward(h, 10'000'000);
  p.max_time = 2 * std::numbers::pi;
  const auto line = ss::tracer::trace(g, {1, 0, 0}, p);
  return ss::length(line.vertices.back().position - Vec3{1, 0, 0});
}

}  // namespace

TEST(Seeding, UniformGridCorners) {
  const auto g = field(AnalyticKind::constant, 3, 0.0, 1.0);
  ss::tracer::SeedSpec spec;
  spec.strategy = ss::tracer::SeedStrategy::uniform_grid;
  spec.dims = {2, 2, 2};
  spec.region = {{0, 0, 0}, {1, 1, 1}};
  const auto pts = ss::tracer::seed_points(spec, g);
  ASSERT_EQ(pts.size(), 8u);
  for (int c = 0; c < 8; ++c) {
    const Vec3 want{double(c & 1), double((c >> 1) & 1), double((c >> 2) & 1)};
    EXPECT_NE(std::find_if(pts.begin(), pts.end(),
                           [&](const Vec3& p) { return p.x == want.x && p.y == want.y &&
                                                       p.z == want.z; }),
              pts.end());
  }
}

TEST(Seeding, RandomIsDeterministicAndInside) {
  const auto g = field(AnalyticKind::abc, 8, 0.0, 6.0);
  ss::tracer::SeedSpec spec;
  spec.count = 100;
  spec.region = {{1, 2, 3}, {2, 3, 5}};
  spec.rng_seed = 99;
  const auto a = ss::tracer::seed_points(spec, g);
  const auto b = ss::tracer::seed_points(spec, g);
  ASSERT_EQ(a.size(), 100u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x, b[i].x);
    EXPECT_EQ(a[i].y, b[i].y);
    EXPECT_EQ(a[i].z, b[i].z);
    EXPECT_TRUE(spec.region.contains(a[i]));
  }
  spec.rng_seed = 100;
  EXPECT_NE(ss::tracer::seed_points(spec, g)[0].x, a[0].x);
}

TEST(Seeding, RegionOutsideGrid) {
  const auto g = field(AnalyticKind::constant, 3, 0.0, 1.0);
  ss::tracer::SeedSpec spec;
  spec.count = 5;
  spec.region = {{5, 5, 5}, {6, 6, 6}};
  try {
    (void)ss::tracer::seed_points(spec, g);
    FAIL();
  } catch (const ss::TraceError& e) {
    EXPECT_EQ(e.kind(), ss::TraceError::Kind::region_outside);
  }
}

TEST(Trace, ConstantFieldIsExact) {
  const auto g = field(AnalyticKind::constant, 5, -2.0, 2.0);
  const auto line = ss::tracer::trace(g, {0, 0, 0}, forward(0.1, 10));
  ASSERT_EQ(line.size(), 11u);
  EXPECT_NEAR(line.vertices.back().position.x, 1.0, 1e-12);
  EXPECT_NEAR(line.vertices.back().position.y, 0.0, 1e-12);
  EXPECT_NEAR(line.vertices.back().position.z, 0.0, 1e-12);
  for (const auto& v : line.vertices) {
    EXPECT_NEAR(v.s, v.t, 1e-12);
    EXPECT_NEAR(v.speed, 1.0, 1e-12);
  }
  EXPECT_TRUE(ss::tracer::satisfies_invariants(line));
}

TEST(Trace, CircleOneRevolution) {
  const auto g = field(AnalyticKind::circular, 17, -2.0, 2.0);
  auto p = forward(0.01, 10'000'000);
  p.max_time = 2 * std::numbers::pi;
  const auto line = ss::tracer::trace(g, {1, 0, 0}, p);
  EXPECT_DOUBLE_EQ(line.vertices.back().t, 2 * std::numbers::pi);
  double drift = 0.0;
  for (const auto& v : line.vertices)
    drift = std::max(drift, std::abs(std::hypot(v.position.x, v.position.y) - 1.0));
  EXPECT_LT(drift, 1e-6);
  EXPECT_LT(ss::length(line.vertices.back().position - Vec3{1, 0, 0}), 1e-5);
}

TEST(Trace, FourthOrderConvergence) {
  const double e1 = circle_error(0.04);
  const double e2 = circle_error(0.02);
  EXPECT_GT(e1 / e2, 8.0);
  EXPECT_LT(e1 / e2, 32.0);
}

TEST(Trace, BothDirectionsShareSeed) {
  const auto g = field(AnalyticKind::constant, 5, -2.0, 2.0);
  TraceParams p;
  p.step = 0.1;
  p.max_steps = 5;
  const auto line = ss::tracer::trace(g, {0, 0, 0}, p);
  ASSERT_EQ(line.size(), 11u);
  EXPECT_EQ(line.seed_vertex, 5u);
  EXPECT_EQ(line.vertices[5].t, 0.0);
  EXPECT_EQ(line.vertices[5].s, 0.0);
  EXPECT_NEAR(line.vertices.front().position.x, -0.5, 1e-12);
  EXPECT_NEAR(line.vertices.front().t, -0.5, 1e-12);
  EXPECT_NEAR(line.vertices.front().s, 0.5, 1e-12);
  EXPECT_TRUE(ss::tracer::satisfies_invariants(line));
}

TEST(Trace, StopsAtBoundary) {
  const auto g = field(AnalyticKind::constant, 5, -1.0, 1.0);
  const auto line = ss::tracer::trace(g, {0, 0, 0}, forward(0.3, 1000));
  for (const auto& v : line.vertices) EXPECT_TRUE(g.bounds().contains(v.position));
  EXPECT_LE(line.vertices.back().position.x, 1.0);
  EXPECT_GT(line.vertices.back().position.x, 0.6);
}

TEST(Trace, StopsBelowMinSpeed) {
  const auto g = field(AnalyticKind::circular, 5, -1.0, 1.0);
  auto p = forward(0.1, 100);
  p.min_speed = 0.5;
  const auto line = ss::tracer::trace(g, {0.1, 0, 0}, p);
  EXPECT_LE(line.size(), 1u);
}

TEST(Trace, SeedOutsideThrows) {
  const auto g = field(AnalyticKind::constant, 3, 0.0, 1.0);
  try {
    (void)ss::tracer::trace(g, {2, 0, 0}, forward(0.1, 10));
    FAIL();
  } catch (const ss::TraceError& e) {
    EXPECT_EQ(e.kind(), ss::TraceError::Kind::seed_outside);
  }
  EXPECT_THROW((void)ss::tracer::trace(g, {0.5, 0.5, 0.5}, forward(0.0, 10)), ss::TraceError);
}

TEST(TraceAll, CornerSeedsGiveOneLineEach) {
  const auto g = field(AnalyticKind::constant, 3, 0.0, 1.0);
  std::vector<Vec3> seeds;
  for (int c = 0; c < 8; ++c) seeds.push_back({0.0, double((c >> 1) & 1), double((c >> 2) & 1)});
  // Backward from x=0 exits at once; the forward half carries the line.
  TraceParams p;
  p.step = 0.1;
  p.max_steps = 20;
  const auto set = ss::tracer::trace_all(g, seeds, p);
  EXPECT_EQ(set.lines.size(), 8u);
}

TEST(TraceAll, DropsOutOfBoundsSeed) {
  const auto g = field(AnalyticKind::abc, 8, 0.0, 6.0);
  std::vector<Vec3> seeds{{1, 1, 1}, {2, 2, 2}, {9, 9, 9}, {3, 3, 3}};
  ss::tracer::TraceStats stats;
  const auto set = ss::tracer::trace_all(g, seeds, forward(0.05, 50), &stats);
  EXPECT_EQ(set.lines.size(), 3u);
  EXPECT_EQ(stats.dropped, 1u);
  EXPECT_EQ(stats.drop_reasons.at("seed_outside"), 1u);
  EXPECT_EQ(set.lines[2].seed_index, 3);
}

TEST(TraceAll, InvariantSweep2500Seeds) {
  const auto g = ss::field::gen_analytic_field(AnalyticKind::abc, {32, 32, 32}, {});
  ss::tracer::SeedSpec spec;
  spec.count = 2500;
  spec.region = g.bounds();
  spec.rng_seed = 2500;
  const auto seeds = ss::tracer::seed_points(spec, g);
  TraceParams p;
  p.step = 0.05;
  p.max_steps = 1000;
  ss::tracer::TraceStats stats;
  const auto set = ss::tracer::trace_all(g, seeds, p, &stats);
  EXPECT_LE(set.vertex_count(), 2500u * 2001u);
  EXPECT_EQ(stats.vertices, set.vertex_count());
  for (const auto& line : set.lines) {
    ASSERT_TRUE(ss::tracer::satisfies_invariants(line)) << "seed " << line.seed_index;
    ASSERT_LE(line.size(), 2001u);
    ASSERT_EQ(line.attributes.size(), line.size() * set.channels.size());
  }
}

TEST(TraceAll, ThreadCountDoesNotChangeOutput) {
  const auto g = ss::field::gen_analytic_field(AnalyticKind::abc, {16, 16, 16}, {});
  ss::tracer::SeedSpec spec;
  spec.count = 64;
  spec.region = g.bounds();
  const auto seeds = ss::tracer::seed_points(spec, g);
  TraceParams p;
  p.step = 0.05;
  p.max_steps = 200;
  std::stringstream a, b;
  ss::tracer::write_sls(ss::tracer::trace_all(g, seeds, p, nullptr, 1), a);
  ss::tracer::write_sls(ss::tracer::trace_all(g, seeds, p, nullptr, 4), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Sls, RoundTrip) {
  const auto g = ss::field::gen_analytic_field(AnalyticKind::abc, {8, 8, 8}, {});
  std::vector<Vec3> seeds{{1, 1, 1}, {2, 3, 4}};
  TraceParams p;
  p.step = 0.05;
  p.max_steps = 30;
  const auto set = ss::tracer::trace_all(g, seeds, p);
  std::stringstream buf;
  ss::tracer::write_sls(set, buf);
  const auto back = ss::tracer::read_sls(buf);
  ASSERT_EQ(back.lines.size(), set.lines.size());
  EXPECT_EQ(back.channels, set.channels);
  for (std::size_t i = 0; i < set.lines.size(); ++i) {
    const auto& x = set.lines[i];
    const auto& y = back.lines[i];
    ASSERT_EQ(x.size(), y.size());
    EXPECT_EQ(x.seed_vertex, y.seed_vertex);
    EXPECT_EQ(x.attributes, y.attributes);
    // Rows are float32 on disk.
    auto f32 = [](double v) { return static_cast<double>(static_cast<float>(v)); };
    for (std::size_t v = 0; v < x.size(); ++v) {
      EXPECT_EQ(f32(x.vertices[v].position.x), y.vertices[v].position.x);
      EXPECT_EQ(f32(x.vertices[v].t), y.vertices[v].t);
      EXPECT_EQ(f32(x.vertices[v].s), y.vertices[v].s);
    }
  }
  std::stringstream again;
  ss::tracer::write_sls(back, again);
  EXPECT_EQ(again.str(), buf.str());
}
