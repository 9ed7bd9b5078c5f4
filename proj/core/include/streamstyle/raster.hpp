// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "streamstyle/geometry.hpp"
#include "streamstyle/style.hpp"

namespace streamstyle::raster {

using Rgba8 = std::array<std::uint8_t, 4>;

// floor(clamp(v, 0, 1) * 255 + 0.5)
std::uint8_t quantize(double v);
Rgba8 to_rgba8(const style::Color& c);

/// Color + depth target. Depth holds linear view-space depth, cleared to the
/// camera's far plane. The optional style buffer records which style produced
/// each pixel (-1 for background).
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, Rgba8 background, float clear_depth);

  int width() const { return width_; }
  int height() const { return height_; }
  const Rgba8& background() const { return background_; }
  float clear_depth() const { return clear_depth_; }

  void clear();
  void enable_style_ids();
  bool has_style_ids() const { return !style_ids_.empty(); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }
  const Rgba8& color(int x, int y) const { return color_[index(x, y)]; }
  float depth(int x, int y) const { return depth_[index(x, y)]; }
  std::int32_t style_id(int x, int y) const { return style_ids_[index(x, y)]; }

  std::span<Rgba8> color_data() { return color_; }
  std::span<const Rgba8> color_data() const { return color_; }
  std::span<float> depth_data() { return depth_; }
  std::span<const float> depth_data() const { return depth_; }
  std::span<std::int32_t> style_id_data() { return style_ids_; }
  std::span<const std::int32_t> style_id_data() const { return style_ids_; }

 private:
  int width_ = 0;
  int height_ = 0;
  Rgba8 background_{0, 0, 0, 0};
  float clear_depth_ = 1.0f;
  std::vector<Rgba8> color_;
  std::vector<float> depth_;
  std::vector<std::int32_t> style_ids_;
};

// ---------------------------------------------------------------------------
// Fragment stage

struct FragmentContext {
  double u = 0.0;  // lateral strip coordinate in [-1, 1]
  style::LineSample sample;
  double centerline_depth = 0.0;
  const style::LineStyle* style = nullptr;
  // Width units spanned by |u| = 1: the strip's maximum style width.
  double strip_total_width = 0.0;
};

struct BandHit {
  std::size_t band = 0;
  double b = 0.0;  // lateral position within the band, 0 at its inner edge
};

// Cumulative band lookup over current widths (centerline outward). A
// position exactly on a boundary belongs to the outer band; positions past
// the total are transparent.
std::optional<BandHit> locate_band(std::span<const double> widths, double lateral);

struct ShadedFragment {
  style::Color color;
  double depth = 0.0;
  std::size_t band = 0;
  double b = 0.0;
};

// Chooses the band under the fragment and its color and depth. Halo bands are
// folded back linearly: depth = centerline_depth + depth_offset * b.
// Returns nullopt for the transparent margin.
std::optional<ShadedFragment> shade_fragment(const FragmentContext& ctx,
                                             const style::AttributeTable& table);

// Like shade_fragment, with caller-provided scratch for the band widths.
std::optional<ShadedFragment> shade_fragment(const FragmentContext& ctx,
                                             const style::AttributeTable& table,
                                             std::vector<double>& scratch);

// ---------------------------------------------------------------------------
// Scan conversion

struct RasterOptions {
  int threads = 1;
  int tile_size = 32;
  // Guard band for side-plane clipping, in multiples of the viewport.
  double guard_band = 4.0;
};

struct RasterStats {
  std::size_t segments = 0;
  std::size_t triangles_clipped = 0;
  std::size_t fragments = 0;
};

/// Scan-converts every strip quad as two triangles with perspective-correct
/// interpolation, shades each covered pixel and depth-tests it (less-than;
/// ties keep the earlier strip). Pixel centers sit at +0.5; vertices are
/// snapped to 1/256 pixel and edges follow a top-left fill rule. Tiles are
/// owned by a single worker each, so output does not depend on `threads`.
void rasterize(std::span<const geometry::RibbonStrip> strips, const geometry::Camera& camera,
               const style::StyleSet& styles, const style::AttributeTable& table, Frame& frame,
               const RasterOptions& options = {}, RasterStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Image output

// 8-bit RGBA, non-interlaced, fixed compression settings.
std::vector<std::uint8_t> encode_png(const Frame& frame);
void save_image(const Frame& frame, const std::filesystem::path& path);
// Binary P6, alpha dropped.
void save_ppm(const Frame& frame, const std::filesystem::path& path);

struct DecodedImage {
  int width = 0;
  int height = 0;
  std::vector<Rgba8> pixels;
};

// Throws Error on malformed input. Accepts any PNG and converts to RGBA8.
DecodedImage decode_png(std::span<const std::uint8_t> bytes);
DecodedImage load_png(const std::filesystem::path& path);

}  // namespace streamstyle::raster
