// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "streamstyle/style.hpp"
#include "streamstyle/tracer.hpp"
#include "streamstyle/vec.hpp"

namespace streamstyle::geometry {

struct ClipPoint {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;  // view-space depth
};

/// Perspective pinhole camera. Depth is measured along the viewing direction,
/// positive in front of the eye.
class Camera {
 public:
  Camera() = default;
  // Throws std::invalid_argument if eye == look_at, up is parallel to the
  // view direction, fov_y is outside (0, 180), aspect <= 0 or !(0 < near < far).
  Camera(Vec3 eye, Vec3 look_at, Vec3 up, double fov_y_degrees, double aspect, double near,
         double far);

  const Vec3& eye() const { return eye_; }
  const Vec3& look_at() const { return look_at_; }
  const Vec3& up() const { return up_; }
  double fov_y() const { return fov_y_; }
  double aspect() const { return aspect_; }
  double near() const { return near_; }
  double far() const { return far_; }

  // Orthonormal camera basis.
  const Vec3& forward() const { return forward_; }
  const Vec3& right() const { return right_; }
  const Vec3& true_up() const { return true_up_; }

  // Distance along forward().
  double view_depth(const Vec3& p) const { return dot(p - eye_, forward_); }
  // x, y scaled by the projection; divide by w for NDC in [-1, 1].
  ClipPoint to_clip(const Vec3& p) const;

 private:
  Vec3 eye_{0, 0, 1};
  Vec3 look_at_{0, 0, 0};
  Vec3 up_{0, 1, 0};
  double fov_y_ = 45.0;
  double aspect_ = 1.0;
  double near_ = 0.01;
  double far_ = 100.0;
  Vec3 forward_{0, 0, -1};
  Vec3 right_{1, 0, 0};
  Vec3 true_up_{0, 1, 0};
  double focal_ = 1.0;
};

struct StripVertex {
  Vec3 left;    // u = -1
  Vec3 right;   // u = +1
  Vec3 offset;  // unit lateral direction, right - center = half_width * offset
  double depth = 0.0;  // centerline view-space depth
  std::uint32_t style = 0;
};

/// View-oriented ribbon for one streamline. Longitudinal attributes (t, s,
/// speed, channels) are read from the source line; the strip must not outlive
/// the StreamlineSet it was built from.
struct RibbonStrip {
  const tracer::Streamline* line = nullptr;
  std::vector<StripVertex> vertices;
  double half_width = 0.0;
  // Vertices where the tangent was parallel to the view direction and the
  // offset was borrowed from a neighbour.
  std::size_t fallback_vertices = 0;
};

// Cross products below this length (unit tangent x unit view vector) count as
// view-parallel.
inline constexpr double kParallelEpsilon = 1e-6;

// Half-width is global_scale times the widest style the set can select, so
// the footprint never changes across transfer-function switches. The
// per-vertex style index is resolved with StyleSet::select. Throws
// std::invalid_argument unless global_scale > 0.
std::vector<RibbonStrip> build_strips(const tracer::StreamlineSet& lines, const Camera& camera,
                                      const style::StyleSet& styles,
                                      const style::AttributeTable& table, double global_scale,
                                      int threads = 1);

RibbonStrip build_strip(const tracer::Streamline& line, const Camera& camera,
                        const style::StyleSet& styles, const style::AttributeTable& table,
                        double half_width);

// Observed t, s and speed ranges over a line set plus the grid's channel
// ranges, for normalizing style attributes.
style::AttributeTable make_attribute_table(const field::VectorFieldGrid& grid,
                                           const tracer::StreamlineSet& lines);

}  // namespace streamstyle::geometry
