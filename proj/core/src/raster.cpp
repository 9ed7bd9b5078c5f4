// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/raster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "streamstyle/parallel.hpp"

namespace streamstyle::raster {

std::uint8_t quantize(double v) {
  if (!(v > 0.0)) return 0;
  if (v >= 1.0) return 255;
  return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

Rgba8 to_rgba8(const style::Color& c) { return {quantize(c.r), quantize(c.g), quantize(c.b), 255}; }

Frame::Frame(int width, int height, Rgba8 background, float clear_depth)
    : width_(width), height_(height), background_(background), clear_depth_(clear_depth) {
  if (width_ <= 0 || height_ <= 0) throw std::invalid_argument("frame size must be positive");
  color_.resize(static_cast<std::size_t>(width_) * height_);
  depth_.resize(color_.size());
  clear();
}

void Frame::clear() {
  std::fill(color_.begin(), color_.end(), background_);
  std::fill(depth_.begin(), depth_.end(), clear_depth_);
  std::fill(style_ids_.begin(), style_ids_.end(), -1);
}

void Frame::enable_style_ids() { style_ids_.assign(color_.size(), -1); }

// ---------------------------------------------------------------------------

std::optional<BandHit> locate_band(std::span<const double> widths, double lateral) {
  double inner = 0.0;
  std::optional<std::size_t> last_nonzero;
  for (std::size_t k = 0; k < widths.size(); ++k) {
    const double w = widths[k];
    if (w > 0.0) {
      if (lateral < inner + w) return BandHit{k, (lateral - inner) / w};
      last_nonzero = k;
    }
    inner += w;
  }
  if (last_nonzero && lateral <= inner) return BandHit{*last_nonzero, 1.0};
  return std::nullopt;
}

std::optional<ShadedFragment> shade_fragment(const FragmentContext& ctx,
                                             const style::AttributeTable& table,
                                             std::vector<double>& scratch) {
  const auto& bands = ctx.style->bands;
  scratch.resize(bands.size());
  for (std::size_t k = 0; k < bands.size(); ++k)
    scratch[k] = style::current_band_width(bands[k], table, ctx.sample);
  const double lateral = std::abs(ctx.u) * ctx.strip_total_width;
  const auto hit = locate_band(scratch, lateral);
  if (!hit) return std::nullopt;
  const style::BandSpec& band = bands[hit->band];
  ShadedFragment f;
  f.band = hit->band;
  f.b = hit->b;
  f.color = style::resolve_color(band.color, table, ctx.sample, hit->b);
  f.depth = ctx.centerline_depth + (band.is_halo ? band.depth_offset * hit->b : 0.0);
  return f;
}

std::optional<ShadedFragment> shade_fragment(const FragmentContext& ctx,
                                             const style::AttributeTable& table) {
  std::vector<double> scratch;
  return shade_fragment(ctx, table, scratch);
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixel = 1 << kSubpixelBits;

struct ClipVert {
  double x, y, w;
  double u;  // lateral strip coordinate
  double a;  // position along the segment, 0 at vertex j, 1 at j + 1
};

struct ScreenVert {
  std::int64_t X, Y;  // 1/256 pixel
  double inv_w, u_w, a_w;
};

struct ScreenTri {
  ScreenVert v[3];
};

// At most two source triangles, each clipped by five planes into <= 8-gons.
constexpr int kMaxTrisPerSegment = 12;

class Projector {
 public:
  Projector(int width, int height, double near, double guard)
      : width_(width), height_(height), near_(near), guard_(guard) {}

  double distance(const ClipVert& v, int plane) const {
    switch (plane) {
      case 0:
        return v.w - near_;
      case 1:
        return guard_ * v.w - v.x;
      case 2:
        return guard_ * v.w + v.x;
      case 3:
        return guard_ * v.w - v.y;
      default:
        return guard_ * v.w + v.y;
    }
  }

  bool inside_all(const ClipVert& v) const {
    for (int p = 0; p < 5; ++p)
      if (distance(v, p) < 0.0) return false;
    return true;
  }

  ScreenVert to_screen(const ClipVert& v) const {
    const double inv_w = 1.0 / v.w;
    const double sx = (v.x * inv_w + 1.0) * 0.5 * width_;
    const double sy = (1.0 - v.y * inv_w) * 0.5 * height_;
    return {std::llround(sx * kSubpixel), std::llround(sy * kSubpixel), inv_w, v.u * inv_w,
            v.a * inv_w};
  }

  // Appends the screen triangles covering clip triangle (a, b, c).
  int emit(const ClipVert& a, const ClipVert& b, const ClipVert& c, ScreenTri* out) const {
    if (inside_all(a) && inside_all(b) && inside_all(c)) {
      out[0] = {{to_screen(a), to_screen(b), to_screen(c)}};
      return 1;
    }
    ClipVert poly[2][9];
    int count = 3;
    poly[0][0] = a;
    poly[0][1] = b;
    poly[0][2] = c;
    int cur = 0;
    for (int plane = 0; plane < 5 && count > 0; ++plane) {
      const ClipVert* in = poly[cur];
      ClipVert* res = poly[cur ^ 1];
      int n = 0;
      for (int i = 0; i < count; ++i) {
        const ClipVert& p = in[i];
        const ClipVert& q = in[(i + 1) % count];
        const double dp = distance(p, plane);
        const double dq = distance(q, plane);
        if (dp >= 0.0) res[n++] = p;
        if ((dp >= 0.0) != (dq >= 0.0)) {
          const double t = dp / (dp - dq);
          res[n++] = {p.x + (q.x - p.x) * t, p.y + (q.y - p.y) * t, p.w + (q.w - p.w) * t,
                      p.u + (q.u - p.u) * t, p.a + (q.a - p.a) * t};
        }
      }
      count = n;
      cur ^= 1;
    }
    if (count < 3) return 0;
    const ClipVert* poly_out = poly[cur];
    const ScreenVert v0 = to_screen(poly_out[0]);
    for (int i = 1; i + 1 < count; ++i)
      out[i - 1] = {{v0, to_screen(poly_out[i]), to_screen(poly_out[i + 1])}};
    return count - 2;
  }

 private:
  int width_;
  int height_;
  double near_;
  double guard_;
};

struct PixelRect {
  int x0, y0, x1, y1;  // inclusive
  bool empty() const { return x0 > x1 || y0 > y1; }
};

PixelRect pixel_bounds(const ScreenTri& t, int width, int height) {
  std::int64_t minx = t.v[0].X, maxx = t.v[0].X, miny = t.v[0].Y, maxy = t.v[0].Y;
  for (int i = 1; i < 3; ++i) {
    minx = std::min(minx, t.v[i].X);
    maxx = std::max(maxx, t.v[i].X);
    miny = std::min(miny, t.v[i].Y);
    maxy = std::max(maxy, t.v[i].Y);
  }
  // Pixel x is covered only if its center x*256+128 lies in [minx, maxx].
  auto lo = [](std::int64_t v) {
    return static_cast<int>((v - kSubpixel / 2 + kSubpixel - 1) >> kSubpixelBits);
  };
  auto hi = [](std::int64_t v) { return static_cast<int>((v - kSubpixel / 2) >> kSubpixelBits); };
  PixelRect r{std::max(0, lo(minx)), std::max(0, lo(miny)), std::min(width - 1, hi(maxx)),
              std::min(height - 1, hi(maxy))};
  return r;
}

class SegmentSource {
 public:
  SegmentSource(std::span<const geometry::RibbonStrip> strips, const geometry::Camera& camera,
                const Projector& projector, int threads)
      : strips_(strips), projector_(projector) {
    first_segment_.resize(strips.size() + 1, 0);
    first_vertex_.resize(strips.size() + 1, 0);
    for (std::size_t i = 0; i < strips.size(); ++i) {
      const std::size_t n = strips[i].vertices.size();
      first_segment_[i + 1] = first_segment_[i] + (n >= 2 ? n - 1 : 0);
      first_vertex_[i + 1] = first_vertex_[i] + n;
    }
    clip_.resize(2 * first_vertex_.back());
    parallel_for(strips.size(), threads, [&](std::size_t i) {
      const auto& verts = strips[i].vertices;
      ClipPoint_* out = clip_.data() + 2 * first_vertex_[i];
      for (std::size_t j = 0; j < verts.size(); ++j) {
        const auto l = camera.to_clip(verts[j].left);
        const auto r = camera.to_clip(verts[j].right);
        out[2 * j] = {l.x, l.y, l.w};
        out[2 * j + 1] = {r.x, r.y, r.w};
      }
    });
    segment_strip_.resize(first_segment_.back());
    for (std::size_t i = 0; i < strips.size(); ++i)
      for (std::size_t s = first_segment_[i]; s < first_segment_[i + 1]; ++s)
        segment_strip_[s] = static_cast<std::uint32_t>(i);
  }

  std::size_t segment_count() const { return first_segment_.back(); }

  struct Location {
    std::size_t strip;
    std::size_t vertex;  // segment spans vertex .. vertex + 1
  };
  Location locate(std::size_t segment) const {
    const std::size_t strip = segment_strip_[segment];
    return {strip, segment - first_segment_[strip]};
  }

  const geometry::RibbonStrip& strip(std::size_t i) const { return strips_[i]; }

  int emit(std::size_t segment, ScreenTri* out) const {
    const Location loc = locate(segment);
    const ClipPoint_* c = clip_.data() + 2 * (first_vertex_[loc.strip] + loc.vertex);
    const ClipVert l0{c[0].x, c[0].y, c[0].w, -1.0, 0.0};
    const ClipVert r0{c[1].x, c[1].y, c[1].w, 1.0, 0.0};
    const ClipVert l1{c[2].x, c[2].y, c[2].w, -1.0, 1.0};
    const ClipVert r1{c[3].x, c[3].y, c[3].w, 1.0, 1.0};
    int n = projector_.emit(l0, r0, l1, out);
    n += projector_.emit(r0, r1, l1, out + n);
    return n;
  }

 private:
  struct ClipPoint_ {
    double x, y, w;
  };
  std::span<const geometry::RibbonStrip> strips_;
  const Projector& projector_;
  std::vector<std::size_t> first_segment_;
  std::vector<std::size_t> first_vertex_;
  std::vector<ClipPoint_> clip_;
  std::vector<std::uint32_t> segment_strip_;
};

struct TileRange {
  std::uint16_t tx0, ty0, tx1, ty1;
  bool empty;
};

class TileShader {
 public:
  TileShader(const SegmentSource& source, const geometry::Camera& camera,
             const style::StyleSet& styles, const style::AttributeTable& table, Frame& frame)
      : source_(source), styles_(styles), table_(table), frame_(frame) {
    (void)camera;
    strip_total_width_ = styles.strip_total_width();
  }

  std::size_t fragments() const { return fragments_; }

  void shade_segment(std::size_t segment, const PixelRect& tile) {
    ScreenTri tris[kMaxTrisPerSegment];
    const int n = source_.emit(segment, tris);
    if (n == 0) return;
    const auto loc = source_.locate(segment);
    const auto& strip = source_.strip(loc.strip);
    line_ = strip.line;
    v0_ = loc.vertex;
    depth0_ = strip.vertices[v0_].depth;
    depth1_ = strip.vertices[v0_ + 1].depth;
    for (int i = 0; i < n; ++i) raster_triangle(tris[i], tile);
  }

 private:
  static bool top_left(std::int64_t dx, std::int64_t dy) { return dy < 0 || (dy == 0 && dx > 0); }

  void raster_triangle(ScreenTri t, const PixelRect& tile) {
    auto edge = [](const ScreenVert& a, const ScreenVert& b, std::int64_t px, std::int64_t py) {
      return (b.X - a.X) * (py - a.Y) - (b.Y - a.Y) * (px - a.X);
    };
    std::int64_t area = edge(t.v[0], t.v[1], t.v[2].X, t.v[2].Y);
    if (area == 0) return;
    if (area < 0) {
      std::swap(t.v[1], t.v[2]);
      area = -area;
    }
    PixelRect r = pixel_bounds(t, frame_.width(), frame_.height());
    r.x0 = std::max(r.x0, tile.x0);
    r.y0 = std::max(r.y0, tile.y0);
    r.x1 = std::min(r.x1, tile.x1);
    r.y1 = std::min(r.y1, tile.y1);
    if (r.empty()) return;

    const ScreenVert& a = t.v[0];
    const ScreenVert& b = t.v[1];
    const ScreenVert& c = t.v[2];
    // Edge k is opposite vertex k.
    const std::int64_t dx[3] = {c.X - b.X, a.X - c.X, b.X - a.X};
    const std::int64_t dy[3] = {c.Y - b.Y, a.Y - c.Y, b.Y - a.Y};
    const std::int64_t bias[3] = {top_left(dx[0], dy[0]) ? 0 : 1, top_left(dx[1], dy[1]) ? 0 : 1,
                                  top_left(dx[2], dy[2]) ? 0 : 1};
    const std::int64_t px0 = static_cast<std::int64_t>(r.x0) * kSubpixel + kSubpixel / 2;
    const std::int64_t py0 = static_cast<std::int64_t>(r.y0) * kSubpixel + kSubpixel / 2;
    std::int64_t row[3] = {edge(b, c, px0, py0), edge(c, a, px0, py0), edge(a, b, px0, py0)};
    const double inv_area = 1.0 / static_cast<double>(area);

    for (int y = r.y0; y <= r.y1; ++y) {
      std::int64_t e[3] = {row[0], row[1], row[2]};
      for (int x = r.x0; x <= r.x1; ++x) {
        if (e[0] >= bias[0] && e[1] >= bias[1] && e[2] >= bias[2]) {
          const double l0 = static_cast<double>(e[0]) * inv_area;
          const double l1 = static_cast<double>(e[1]) * inv_area;
          const double l2 = static_cast<double>(e[2]) * inv_area;
          const double iw = l0 * a.inv_w + l1 * b.inv_w + l2 * c.inv_w;
          const double u = (l0 * a.u_w + l1 * b.u_w + l2 * c.u_w) / iw;
          const double s = (l0 * a.a_w + l1 * b.a_w + l2 * c.a_w) / iw;
          shade_pixel(x, y, std::clamp(u, -1.0, 1.0), std::clamp(s, 0.0, 1.0));
        }
        // Stepping one pixel right: E changes by -dy * 256.
        for (int k = 0; k < 3; ++k) e[k] -= dy[k] * kSubpixel;
      }
      for (int k = 0; k < 3; ++k) row[k] += dx[k] * kSubpixel;
    }
  }

  void shade_pixel(int x, int y, double u, double along) {
    const auto& va = line_->vertices[v0_];
    const auto& vb = line_->vertices[v0_ + 1];
    const std::size_t nc = line_->channel_count;
    channels_.resize(nc);
    const float* ca = line_->attributes.data() + v0_ * nc;
    const float* cb = ca + nc;
    for (std::size_t k = 0; k < nc; ++k)
      channels_[k] = static_cast<double>(ca[k]) + (static_cast<double>(cb[k]) - ca[k]) * along;

    FragmentContext ctx;
    ctx.u = u;
    ctx.sample = {va.t + (vb.t - va.t) * along, va.s + (vb.s - va.s) * along,
                  va.speed + (vb.speed - va.speed) * along, channels_};
    ctx.centerline_depth = depth0_ + (depth1_ - depth0_) * along;
    const std::size_t style_index = styles_.select(table_, ctx.sample);
    ctx.style = &styles_.styles()[style_index];
    ctx.strip_total_width = strip_total_width_;
    ++fragments_;

    const auto frag = shade_fragment(ctx, table_, widths_);
    if (!frag) return;
    const float depth = static_cast<float>(frag->depth);
    const std::size_t idx = frame_.index(x, y);
    auto depth_buf = frame_.depth_data();
    if (!(depth < depth_buf[idx])) return;
    depth_buf[idx] = depth;
    frame_.color_data()[idx] = to_rgba8(frag->color);
    if (frame_.has_style_ids()) frame_.style_id_data()[idx] = static_cast<std::int32_t>(style_index);
  }

  const SegmentSource& source_;
  const style::StyleSet& styles_;
  const style::AttributeTable& table_;
  Frame& frame_;
  double strip_total_width_ = 0.0;
  std::size_t fragments_ = 0;

  const tracer::Streamline* line_ = nullptr;
  std::size_t v0_ = 0;
  double depth0_ = 0.0;
  double depth1_ = 0.0;
  std::vector<double> channels_;
  std::vector<double> widths_;
};

}  // namespace

void rasterize(std::span<const geometry::RibbonStrip> strips, const geometry::Camera& camera,
               const style::StyleSet& styles, const style::AttributeTable& table, Frame& frame,
               const RasterOptions& options, RasterStats* stats) {
  const int tile = std::max(1, options.tile_size);
  const int tiles_x = (frame.width() + tile - 1) / tile;
  const int tiles_y = (frame.height() + tile - 1) / tile;
  const Projector projector(frame.width(), frame.height(), camera.near(), options.guard_band);
  const SegmentSource source(strips, camera, projector, options.threads);
  const std::size_t segments = source.segment_count();

  // Bin segments by tile; per-tile lists stay in submission order.
  std::vector<TileRange> ranges(segments);
  std::vector<std::uint8_t> clipped(segments, 0);
  parallel_for((segments + 4095) / 4096, options.threads, [&](std::size_t chunk) {
    ScreenTri tris[kMaxTrisPerSegment];
    const std::size_t end = std::min(segments, (chunk + 1) * 4096);
    for (std::size_t s = chunk * 4096; s < end; ++s) {
      const int n = source.emit(s, tris);
      clipped[s] = n != 2;
      PixelRect box{std::numeric_limits<int>::max(), std::numeric_limits<int>::max(), -1, -1};
      for (int i = 0; i < n; ++i) {
        const PixelRect r = pixel_bounds(tris[i], frame.width(), frame.height());
        if (r.empty()) continue;
        box = {std::min(box.x0, r.x0), std::min(box.y0, r.y0), std::max(box.x1, r.x1),
               std::max(box.y1, r.y1)};
      }
      if (box.empty()) {
        ranges[s] = {0, 0, 0, 0, true};
      } else {
        ranges[s] = {static_cast<std::uint16_t>(box.x0 / tile),
                     static_cast<std::uint16_t>(box.y0 / tile),
                     static_cast<std::uint16_t>(box.x1 / tile),
                     static_cast<std::uint16_t>(box.y1 / tile), false};
      }
    }
  });

  const std::size_t tile_count = static_cast<std::size_t>(tiles_x) * tiles_y;
  std::vector<std::size_t> offsets(tile_count + 1, 0);
  for (const auto& r : ranges) {
    if (r.empty) continue;
    for (int ty = r.ty0; ty <= r.ty1; ++ty)
      for (int tx = r.tx0; tx <= r.tx1; ++tx) ++offsets[static_cast<std::size_t>(ty) * tiles_x + tx + 1];
  }
  for (std::size_t i = 0; i < tile_count; ++i) offsets[i + 1] += offsets[i];
  std::vector<std::uint32_t> binned(offsets.back());
  {
    std::vector<std::size_t> cursor(offsets.begin(), offsets.end() - 1);
    for (std::size_t s = 0; s < segments; ++s) {
      const auto& r = ranges[s];
      if (r.empty) continue;
      for (int ty = r.ty0; ty <= r.ty1; ++ty)
        for (int tx = r.tx0; tx <= r.tx1; ++tx)
          binned[cursor[static_cast<std::size_t>(ty) * tiles_x + tx]++] =
              static_cast<std::uint32_t>(s);
    }
  }

  std::vector<std::size_t> tile_fragments(tile_count, 0);
  parallel_for(tile_count, options.threads, [&](std::size_t t) {
    const int tx = static_cast<int>(t % tiles_x);
    const int ty = static_cast<int>(t / tiles_x);
    const PixelRect rect{tx * tile, ty * tile, std::min(frame.width(), (tx + 1) * tile) - 1,
                         std::min(frame.height(), (ty + 1) * tile) - 1};
    TileShader shader(source, camera, styles, table, frame);
    for (std::size_t i = offsets[t]; i < offsets[t + 1]; ++i) shader.shade_segment(binned[i], rect);
    tile_fragments[t] = shader.fragments();
  });

  if (stats) {
    stats->segments = segments;
    stats->triangles_clipped =
        static_cast<std::size_t>(std::count(clipped.begin(), clipped.end(), std::uint8_t{1}));
    stats->fragments = 0;
    for (auto f : tile_fragments) stats->fragments += f;
  }
}

}  // namespace streamstyle::raster
