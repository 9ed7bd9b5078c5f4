// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "streamstyle/parallel.hpp"

namespace streamstyle::geometry {

Camera::Camera(Vec3 eye, Vec3 look_at, Vec3 up, double fov_y_degrees, double aspect, double near,
               double far)
    : eye_(eye),
      look_at_(look_at),
      up_(up),
      fov_y_(fov_y_degrees),
      aspect_(aspect),
      near_(near),
      far_(far) {
  const Vec3 dir = look_at_ - eye_;
  if (!(length(dir) > 0.0)) throw std::invalid_argument("camera eye and look_at coincide");
  if (!(fov_y_ > 0.0 && fov_y_ < 180.0)) throw std::invalid_argument("camera fov_y out of range");
  if (!(aspect_ > 0.0)) throw std::invalid_argument("camera aspect must be > 0");
  if (!(near_ > 0.0 && near_ < far_)) throw std::invalid_argument("camera needs 0 < near < far");
  forward_ = normalize(dir);
  const Vec3 r = cross(forward_, up_);
  if (!(length(r) > 1e-12)) throw std::invalid_argument("camera up is parallel to view direction");
  right_ = normalize(r);
  true_up_ = cross(right_, forward_);
  focal_ = 1.0 / std::tan(0.5 * fov_y_ * std::numbers::pi / 180.0);
}

ClipPoint Camera::to_clip(const Vec3& p) const {
  const Vec3 d = p - eye_;
  return {dot(d, right_) * focal_ / aspect_, dot(d, true_up_) * focal_, dot(d, forward_)};
}

RibbonStrip build_strip(const tracer::Streamline& line, const Camera& camera,
                        const style::StyleSet& styles, const style::AttributeTable& table,
                        double half_width) {
  RibbonStrip strip;
  strip.line = &line;
  strip.half_width = half_width;
  const std::size_t n = line.size();
  strip.vertices.resize(n);

  std::vector<Vec3> offsets(n);
  std::vector<char> valid(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& p = line.vertices[i].position;
    const Vec3& prev = line.vertices[i == 0 ? 0 : i - 1].position;
    const Vec3& next = line.vertices[i + 1 < n ? i + 1 : n - 1].position;
    const Vec3 tangent = normalize(next - prev);
    const Vec3 view_dir = normalize(camera.eye() - p);
    const Vec3 c = cross(tangent, view_dir);
    const double len = length(c);
    if (len >= kParallelEpsilon) {
      offsets[i] = c / len;
      valid[i] = 1;
    }
  }

  // View-parallel vertices reuse the previous offset, or the next one at the
  // start of the line; a fully degenerate line falls back to the camera basis.
  const auto first_valid = std::find(valid.begin(), valid.end(), 1);
  const Vec3 seed_offset =
      first_valid == valid.end() ? camera.right() : offsets[first_valid - valid.begin()];
  Vec3 carry = seed_offset;
  for (std::size_t i = 0; i < n; ++i) {
    if (valid[i]) {
      carry = offsets[i];
    } else {
      offsets[i] = carry;
      ++strip.fallback_vertices;
    }
  }

  std::vector<double> channels(line.channel_count);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = line.vertices[i];
    const auto attrs = line.attrs(i);
    std::copy(attrs.begin(), attrs.end(), channels.begin());
    const style::LineSample sample{v.t, v.s, v.speed, channels};
    StripVertex& sv = strip.vertices[i];
    sv.offset = offsets[i];
    sv.left = v.position - offsets[i] * half_width;
    sv.right = v.position + offsets[i] * half_width;
    sv.depth = camera.view_depth(v.position);
    sv.style = static_cast<std::uint32_t>(styles.select(table, sample));
  }
  return strip;
}

std::vector<RibbonStrip> build_strips(const tracer::StreamlineSet& lines, const Camera& camera,
                                      const style::StyleSet& styles,
                                      const style::AttributeTable& table, double global_scale,
                                      int threads) {
  if (!(global_scale > 0.0)) throw std::invalid_argument("global_scale must be > 0");
  const double half_width = global_scale * styles.strip_total_width();
  std::vector<RibbonStrip> strips(lines.lines.size());
  parallel_for(strips.size(), threads, [&](std::size_t i) {
    strips[i] = build_strip(lines.lines[i], camera, styles, table, half_width);
  });
  return strips;
}

style::AttributeTable make_attribute_table(const field::VectorFieldGrid& grid,
                                           const tracer::StreamlineSet& lines) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  field::ChannelRange t{inf, -inf}, s{inf, -inf}, speed{inf, -inf};
  for (const auto& l : lines.lines) {
    for (const auto& v : l.vertices) {
      t = {std::min(t.min, v.t), std::max(t.max, v.t)};
      s = {std::min(s.min, v.s), std::max(s.max, v.s)};
      speed = {std::min(speed.min, v.speed), std::max(speed.max, v.speed)};
    }
  }
  if (lines.vertex_count() == 0) t = s = speed = {0.0, 0.0};
  std::vector<field::ChannelRange> ranges;
  for (std::size_t c = 0; c < grid.channels().size(); ++c) ranges.push_back(grid.channel_range(c));
  return style::AttributeTable(grid.channel_names(), std::move(ranges), t, s, speed);
}

}  // namespace streamstyle::geometry
