// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "streamstyle/field.hpp"
#include "streamstyle/vec.hpp"

namespace streamstyle::tracer {

enum class SeedStrategy { uniform_grid, random };

struct SeedSpec {
  SeedStrategy strategy = SeedStrategy::random;
  // random: number of points.
  int count = 1;
  // uniform_grid: lattice points per axis.
  std::array<int, 3> dims{1, 1, 1};
  Box region;
  std::uint64_t rng_seed = 0;
};

// Throws TraceError(region_outside) if the region misses the grid and
// std::invalid_argument for non-positive counts.
std::vector<Vec3> seed_points(const SeedSpec& spec, const field::VectorFieldGrid& grid);

enum class Direction { forward, backward, both };

struct TraceParams {
  double step = 0.01;
  int max_steps = 1000;
  double max_time = 1e30;
  double min_speed = 1e-6;
  Direction direction = Direction::both;
};

struct StreamVertex {
  Vec3 position;
  double t = 0.0;      // integration time, negative on the backward half
  double s = 0.0;      // arc length from the seed, >= 0
  double speed = 0.0;  // |velocity| at position
};

/// Polyline through the field. Per-vertex channel samples are stored flat,
/// `channel_count` values per vertex, in grid channel order.
struct Streamline {
  std::vector<StreamVertex> vertices;
  std::vector<float> attributes;
  std::size_t channel_count = 0;
  // Index of the seed vertex within `vertices` (> 0 only for backward/both).
  std::size_t seed_vertex = 0;
  int seed_index = 0;

  std::size_t size() const { return vertices.size(); }
  std::span<const float> attrs(std::size_t vertex) const {
    return {attributes.data() + vertex * channel_count, channel_count};
  }
};

// t strictly increasing along the list; s zero at the seed vertex and
// non-decreasing moving away from it in either direction; speed >= 0; at least
// two vertices.
bool satisfies_invariants(const Streamline& line);

// Fixed-step classical RK4 in integration time. The final step is shortened
// to land on max_time exactly. Stops on leaving the grid, speed < min_speed,
// max_steps (per direction) or max_time.
// Throws TraceError(seed_outside) / TraceError(non_finite) / TraceError(invalid_params).
Streamline trace(const field::VectorFieldGrid& grid, const Vec3& seed, const TraceParams& params);

struct TraceStats {
  std::size_t seeds = 0;
  std::size_t lines = 0;
  std::size_t dropped = 0;
  std::size_t vertices = 0;
  // reason -> count; reasons: "seed_outside", "too_short", "non_finite"
  std::map<std::string, std::size_t> drop_reasons;
};

struct StreamlineSet {
  std::vector<std::string> channels;
  std::vector<Streamline> lines;

  std::size_t vertex_count() const;
};

// Lines with fewer than two vertices and per-seed failures are dropped and
// counted. Output order follows seed order regardless of `threads`.
StreamlineSet trace_all(const field::VectorFieldGrid& grid, std::span<const Vec3> seeds,
                        const TraceParams& params, TraceStats* stats = nullptr, int threads = 1);

// SLS streamline cache:
//   SLS1 <count> <channel names...>\n
//   per line: "<vertex count>\n" then float32 LE rows (x y z t s speed attrs...)
void write_sls(const StreamlineSet& set, std::ostream& out);
StreamlineSet read_sls(std::istream& in);
void save_sls(const StreamlineSet& set, const std::filesystem::path& path);
StreamlineSet load_sls(const std::filesystem::path& path);

}  // namespace streamstyle::tracer
