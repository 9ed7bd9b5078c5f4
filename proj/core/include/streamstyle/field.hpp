// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "streamstyle/vec.hpp"

namespace streamstyle::field {

struct Dims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  friend bool operator==(const Dims&, const Dims&) = default;
};

struct ChannelRange {
  double min = 0.0;
  double max = 0.0;
};

/// Regular 3D grid of velocity vectors with named scalar channels.
///
/// Node (i, j, k) lives at origin + (i, j, k) * spacing; arrays are x-fastest.
/// Values are stored as float32, matching the SFG file layout, while every
/// sampling computation runs in double. Immutable once constructed.
class VectorFieldGrid {
 public:
  struct Channel {
    std::string name;
    std::vector<float> values;
  };

  // Throws std::invalid_argument on dims < 2, non-positive spacing or a
  // length mismatch. Channel ranges are computed from the data.
  VectorFieldGrid(Dims dims, Vec3 origin, Vec3 spacing, std::vector<float> velocity,
                  std::vector<Channel> channels);

  const Dims& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  std::size_t node_count() const { return dims_.count(); }

  // xyz-interleaved, 3 * node_count().
  const std::vector<float>& velocity() const { return velocity_; }
  const std::vector<Channel>& channels() const { return channels_; }
  std::vector<std::string> channel_names() const;
  std::optional<std::size_t> channel_index(std::string_view name) const;
  const ChannelRange& channel_range(std::size_t index) const { return ranges_.at(index); }
  // Throws std::out_of_range for unknown names.
  const ChannelRange& channel_range(std::string_view name) const;

  std::size_t node_index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(dims_.nx) *
               (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_.ny) * k);
  }
  Vec3 node_position(int i, int j, int k) const {
    return {origin_.x + i * spacing_.x, origin_.y + j * spacing_.y, origin_.z + k * spacing_.z};
  }
  Vec3 node_velocity(std::size_t node) const {
    return {velocity_[3 * node], velocity_[3 * node + 1], velocity_[3 * node + 2]};
  }

  // [origin, origin + (dims - 1) * spacing]
  Box bounds() const;

  friend bool operator==(const VectorFieldGrid& a, const VectorFieldGrid& b);

 private:
  Dims dims_;
  Vec3 origin_;
  Vec3 spacing_;
  std::vector<float> velocity_;
  std::vector<Channel> channels_;
  std::vector<ChannelRange> ranges_;
};

struct FieldSample {
  Vec3 velocity;
  // Indexed like VectorFieldGrid::channels(); raw units.
  std::vector<double> attributes;
  bool inside = false;
};

// Trilinear interpolation of velocity and every channel. Points outside the
// grid bounds give inside == false with all values zero.
FieldSample sample(const VectorFieldGrid& grid, const Vec3& p);

// Same as sample() but writes into caller-owned storage; returns inside.
// Avoids the per-call allocation in the tracer's inner loop.
bool sample_into(const VectorFieldGrid& grid, const Vec3& p, Vec3& velocity,
                 double* attributes);

// Velocity only.
bool sample_velocity(const VectorFieldGrid& grid, const Vec3& p, Vec3& velocity);

// (raw - min) / (max - min) clamped to [0, 1]; 0.5 for a degenerate range.
double normalize(const ChannelRange& range, double raw);
// Throws std::out_of_range for an unknown channel.
double normalize_attribute(const VectorFieldGrid& grid, std::string_view name, double raw);

// ---------------------------------------------------------------------------
// SFG file format
//
//   SFG1 nx ny nz ox oy oz sx sy sz C\n
//   channel <name>\n            (C lines)
//   \n
//   float32 LE velocity[3n], then each channel[n] in header order

struct SfgHeader {
  Dims dims;
  Vec3 origin;
  Vec3 spacing;
  std::vector<std::string> channels;
};

// Reads only the ASCII header; throws LoadError.
SfgHeader read_sfg_header(std::istream& in);
SfgHeader read_sfg_header(const std::filesystem::path& path);

VectorFieldGrid read_sfg(std::istream& in);
void write_sfg(const VectorFieldGrid& grid, std::ostream& out);

// Throws LoadError (io, malformed_header, length_mismatch, non_finite).
VectorFieldGrid load_grid(const std::filesystem::path& path);
void save_grid(const VectorFieldGrid& grid, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Analytic test fields

enum class AnalyticKind { constant, circular, abc, cavity_like };

// Throws std::invalid_argument for unknown names.
AnalyticKind parse_analytic_kind(std::string_view name);
std::string_view to_string(AnalyticKind kind);

// Recognised params (all optional):
//   lo, hi      domain extent on every axis (default [-1,1]; abc [0,2pi]; cavity_like [0,1])
//   vx, vy, vz  constant velocity (default 1,0,0)
//   A, B, C     abc coefficients (default 1,1,1)
//   swirl       cavity_like axial component (default 0.25)
// Channels produced: "speed", "temperature", "pressure".
VectorFieldGrid gen_analytic_field(AnalyticKind kind, Dims dims,
                                   const std::map<std::string, double>& params);

// The closed-form velocity used by gen_analytic_field, for oracles.
Vec3 analytic_velocity(AnalyticKind kind, const Vec3& p, const Box& domain,
                       const std::map<std::string, double>& params);

}  // namespace streamstyle::field
