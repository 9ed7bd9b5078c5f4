// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace streamstyle::field {

namespace {

ChannelRange compute_range(const std::vector<float>& values) {
  if (values.empty()) return {};
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {*lo, *hi};
}

// Cell lookup along one axis. Grid coordinates within 1e-10 of a node are
// snapped so that node positions reproduce stored values exactly.
struct AxisCell {
  int index;
  double frac;
};

AxisCell locate(double g, int n) {
  const double r = std::round(g);
  if (std::abs(g - r) < 1e-10) g = r;
  int i = static_cast<int>(std::floor(g));
  i = std::clamp(i, 0, n - 2);
  return {i, g - i};
}

struct Stencil {
  std::size_t nodes[8];
  double weights[8];
};

bool make_stencil(const VectorFieldGrid& grid, const Vec3& p, Stencil& st) {
  if (!grid.bounds().contains(p)) return false;
  const Dims& d = grid.dims();
  const Vec3& o = grid.origin();
  const Vec3& h = grid.spacing();
  const AxisCell cx = locate((p.x - o.x) / h.x, d.nx);
  const AxisCell cy = locate((p.y - o.y) / h.y, d.ny);
  const AxisCell cz = locate((p.z - o.z) / h.z, d.nz);
  int n = 0;
  for (int dz = 0; dz < 2; ++dz) {
    const double wz = dz ? cz.frac : 1.0 - cz.frac;
    for (int dy = 0; dy < 2; ++dy) {
      const double wy = dy ? cy.frac : 1.0 - cy.frac;
      for (int dx = 0; dx < 2; ++dx) {
        const double wx = dx ? cx.frac : 1.0 - cx.frac;
        st.nodes[n] = grid.node_index(cx.index + dx, cy.index + dy, cz.index + dz);
        st.weights[n] = wx * wy * wz;
        ++n;
      }
    }
  }
  return true;
}

Vec3 blend_velocity(const VectorFieldGrid& grid, const Stencil& st) {
  const auto& v = grid.velocity();
  Vec3 out;
  for (int n = 0; n < 8; ++n) {
    const std::size_t b = 3 * st.nodes[n];
    out.x += st.weights[n] * v[b];
    out.y += st.weights[n] * v[b + 1];
    out.z += st.weights[n] * v[b + 2];
  }
  return out;
}

double param(const std::map<std::string, double>& params, const char* key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

Box default_domain(AnalyticKind kind, const std::map<std::string, double>& params) {
  double lo = -1.0;
  double hi = 1.0;
  if (kind == AnalyticKind::abc) {
    lo = 0.0;
    hi = 2.0 * std::numbers::pi;
  } else if (kind == AnalyticKind::cavity_like) {
    lo = 0.0;
    hi = 1.0;
  }
  lo = param(params, "lo", lo);
  hi = param(params, "hi", hi);
  return {{lo, lo, lo}, {hi, hi, hi}};
}

}  // namespace

VectorFieldGrid::VectorFieldGrid(Dims dims, Vec3 origin, Vec3 spacing, std::vector<float> velocity,
                                 std::vector<Channel> channels)
    : dims_(dims),
      origin_(origin),
      spacing_(spacing),
      velocity_(std::move(velocity)),
      channels_(std::move(channels)) {
  if (dims_.nx < 2 || dims_.ny < 2 || dims_.nz < 2)
    throw std::invalid_argument("grid dims must be >= 2 on every axis");
  if (!(spacing_.x > 0.0 && spacing_.y > 0.0 && spacing_.z > 0.0))
    throw std::invalid_argument("grid spacing must be strictly positive");
  const std::size_t n = dims_.count();
  if (velocity_.size() != 3 * n)
    throw std::invalid_argument("velocity array length does not match grid dims");
  ranges_.reserve(channels_.size());
  for (const Channel& c : channels_) {
    if (c.values.size() != n)
      throw std::invalid_argument("channel '" + c.name + "' length does not match grid dims");
    ranges_.push_back(compute_range(c.values));
  }
}

std::vector<std::string> VectorFieldGrid::channel_names() const {
  std::vector<std::string> names;
  names.reserve(channels_.size());
  for (const Channel& c : channels_) names.push_back(c.name);
  return names;
}

std::optional<std::size_t> VectorFieldGrid::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels_.size(); ++i)
    if (channels_[i].name == name) return i;
  return std::nullopt;
}

const ChannelRange& VectorFieldGrid::channel_range(std::string_view name) const {
  const auto idx = channel_index(name);
  if (!idx) throw std::out_of_range("unknown channel '" + std::string(name) + "'");
  return ranges_[*idx];
}

Box VectorFieldGrid::bounds() const {
  return {origin_, node_position(dims_.nx - 1, dims_.ny - 1, dims_.nz - 1)};
}

bool operator==(const VectorFieldGrid& a, const VectorFieldGrid& b) {
  if (!(a.dims_ == b.dims_ && a.origin_ == b.origin_ && a.spacing_ == b.spacing_)) return false;
  if (a.velocity_ != b.velocity_ || a.channels_.size() != b.channels_.size()) return false;
  for (std::size_t i = 0; i < a.channels_.size(); ++i) {
    if (a.channels_[i].name != b.channels_[i].name) return false;
    if (a.channels_[i].values != b.channels_[i].values) return false;
  }
  return true;
}

bool sample_into(const VectorFieldGrid& grid, const Vec3& p, Vec3& velocity, double* attributes) {
  const auto& channels = grid.channels();
  Stencil st;
  if (!make_stencil(grid, p, st)) {
    velocity = {};
    for (std::size_t c = 0; c < channels.size(); ++c) attributes[c] = 0.0;
    return false;
  }
  velocity = blend_velocity(grid, st);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const auto& values = channels[c].values;
    double acc = 0.0;
    for (int n = 0; n < 8; ++n) acc += st.weights[n] * values[st.nodes[n]];
    attributes[c] = acc;
  }
  return true;
}

bool sample_velocity(const VectorFieldGrid& grid, const Vec3& p, Vec3& velocity) {
  Stencil st;
  if (!make_stencil(grid, p, st)) {
    velocity = {};
    return false;
  }
  velocity = blend_velocity(grid, st);
  return true;
}

FieldSample sample(const VectorFieldGrid& grid, const Vec3& p) {
  FieldSample s;
  s.attributes.resize(grid.channels().size());
  s.inside = sample_into(grid, p, s.velocity, s.attributes.data());
  return s;
}

double normalize(const ChannelRange& range, double raw) {
  if (!(range.max > range.min)) return 0.5;
  return std::clamp((raw - range.min) / (range.max - range.min), 0.0, 1.0);
}

double normalize_attribute(const VectorFieldGrid& grid, std::string_view name, double raw) {
  return normalize(grid.channel_range(name), raw);
}

// ---------------------------------------------------------------------------

AnalyticKind parse_analytic_kind(std::string_view name) {
  if (name == "constant") return AnalyticKind::constant;
  if (name == "circular") return AnalyticKind::circular;
  if (name == "abc") return AnalyticKind::abc;
  if (name == "cavity_like") return AnalyticKind::cavity_like;
  throw std::invalid_argument("unknown analytic field kind '" + std::string(name) + "'");
}

std::string_view to_string(AnalyticKind kind) {
  switch (kind) {
    case AnalyticKind::constant:
      return "constant";
    case AnalyticKind::circular:
      return "circular";
    case AnalyticKind::abc:
      return "abc";
    case AnalyticKind::cavity_like:
      return "cavity_like";
  }
  return "unknown";
}

Vec3 analytic_velocity(AnalyticKind kind, const Vec3& p, const Box& domain,
                       const std::map<std::string, double>& params) {
  using std::cos;
  using std::sin;
  constexpr double pi = std::numbers::pi;
  switch (kind) {
    case AnalyticKind::constant:
      return {param(params, "vx", 1.0), param(params, "vy", 0.0), param(params, "vz", 0.0)};
    case AnalyticKind::circular: {
      const Vec3 c = (domain.min + domain.max) * 0.5;
      return {-(p.y - c.y), p.x - c.x, 0.0};
    }
    case AnalyticKind::abc: {
      const double a = param(params, "A", 1.0);
      const double b = param(params, "B", 1.0);
      const double cc = param(params, "C", 1.0);
      return {a * sin(p.z) + cc * cos(p.y), b * sin(p.x) + a * cos(p.z),
              cc * sin(p.y) + b * cos(p.x)};
    }
    case AnalyticKind::cavity_like: {
      // A single convection roll in the xy plane with a slow axial drift,
      // tangential on all walls of the domain.
      const Vec3 ext = domain.max - domain.min;
      const double x = (p.x - domain.min.x) / ext.x;
      const double y = (p.y - domain.min.y) / ext.y;
      const double z = (p.z - domain.min.z) / ext.z;
      const double swirl = param(params, "swirl", 0.25);
      return {-sin(pi * x) * cos(pi * y) * ext.x, cos(pi * x) * sin(pi * y) * ext.y,
              swirl * sin(pi * z) * cos(pi * x) * ext.z};
    }
  }
  throw std::invalid_argument("unknown analytic field kind");
}

VectorFieldGrid gen_analytic_field(AnalyticKind kind, Dims dims,
                                   const std::map<std::string, double>& params) {
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw std::invalid_argument("grid dims must be >= 2 on every axis");
  constexpr double pi = std::numbers::pi;
  const Box domain = default_domain(kind, params);
  const Vec3 ext = domain.max - domain.min;
  const Vec3 spacing{ext.x / (dims.nx - 1), ext.y / (dims.ny - 1), ext.z / (dims.nz - 1)};
  const std::size_t n = dims.count();

  std::vector<float> velocity(3 * n);
  std::vector<float> speed(n), temperature(n), pressure(n);
  for (int k = 0; k < dims.nz; ++k) {
    for (int j = 0; j < dims.ny; ++j) {
      for (int i = 0; i < dims.nx; ++i) {
        const std::size_t idx = static_cast<std::size_t>(i) +
                                static_cast<std::size_t>(dims.nx) *
                                    (static_cast<std::size_t>(j) +
                                     static_cast<std::size_t>(dims.ny) * k);
        const Vec3 p{domain.min.x + i * spacing.x, domain.min.y + j * spacing.y,
                     domain.min.z + k * spacing.z};
        const Vec3 v = analytic_velocity(kind, p, domain, params);
        velocity[3 * idx] = static_cast<float>(v.x);
        velocity[3 * idx + 1] = static_cast<float>(v.y);
        velocity[3 * idx + 2] = static_cast<float>(v.z);
        speed[idx] = static_cast<float>(length(v));

        // Smooth synthetic scalars on the unit-normalised domain.
        const double u = (p.x - domain.min.x) / ext.x;
        const double w = (p.y - domain.min.y) / ext.y;
        const double q = (p.z - domain.min.z) / ext.z;
        temperature[idx] = static_cast<float>(1.0 - u + 0.25 * std::sin(pi * u) * std::sin(pi * w));
        pressure[idx] = static_cast<float>(std::cos(pi * u) * std::cos(pi * w) + 0.5 * q);
      }
    }
  }
  std::vector<VectorFieldGrid::Channel> channels;
  channels.push_back({"speed", std::move(speed)});
  channels.push_back({"temperature", std::move(temperature)});
  channels.push_back({"pressure", std::move(pressure)});
  return VectorFieldGrid(dims, domain.min, spacing, std::move(velocity), std::move(channels));
}

}  // namespace streamstyle::field
