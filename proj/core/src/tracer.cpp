// SPDX-License-Identifier: Apache-2.0
#include "streamstyle/tracer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "streamstyle/binary_io.hpp"
#include "streamstyle/error.hpp"
#include "streamstyle/parallel.hpp"

namespace streamstyle::tracer {

namespace {

// 53 random mantissa bits -> [0, 1). Portable, unlike uniform_real_distribution.
double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double lattice(double lo, double hi, int i, int n) {
  if (n == 1) return 0.5 * (lo + hi);
  if (i == n - 1) return hi;
  return lo + (hi - lo) * (static_cast<double>(i) / (n - 1));
}

struct HalfTrace {
  std::vector<StreamVertex> vertices;
  std::vector<float> attributes;
};

void push_vertex(HalfTrace& half, const Vec3& p, double t, double s, const Vec3& v,
                 std::span<const double> attrs) {
  half.vertices.push_back({p, t, s, length(v)});
  for (double a : attrs) half.attributes.push_back(static_cast<float>(a));
}

// Integrates along sign * v from the seed; the seed vertex is included.
HalfTrace trace_half(const field::VectorFieldGrid& grid, const Vec3& seed, const TraceParams& params,
                     double sign) {
  const std::size_t nc = grid.channels().size();
  std::vector<double> attrs(nc);
  HalfTrace half;
  Vec3 v;
  if (!field::sample_into(grid, seed, v, attrs.data()))
    throw TraceError(TraceError::Kind::seed_outside, "seed lies outside the grid bounds");
  if (!is_finite(v))
    throw TraceError(TraceError::Kind::non_finite, "non-finite velocity sampled at seed");
  push_vertex(half, seed, 0.0, 0.0, v, attrs);

  Vec3 pos = seed;
  double elapsed = 0.0;
  double arc = 0.0;
  const double min_step = params.step * 1e-9;
  for (int step = 0; step < params.max_steps; ++step) {
    if (length(v) < params.min_speed) break;
    const double remaining = params.max_time - elapsed;
    if (remaining <= min_step) break;
    const double h = std::min(params.step, remaining);

    Vec3 k1 = v * sign;
    Vec3 k2, k3, k4;
    if (!field::sample_velocity(grid, pos + k1 * (0.5 * h), k2)) break;
    k2 *= sign;
    if (!field::sample_velocity(grid, pos + k2 * (0.5 * h), k3)) break;
    k3 *= sign;
    if (!field::sample_velocity(grid, pos + k3 * h, k4)) break;
    k4 *= sign;
    const Vec3 next = pos + (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (h / 6.0);
    if (!is_finite(next))
      throw TraceError(TraceError::Kind::non_finite, "non-finite field value during integration");

    Vec3 v_next;
    if (!field::sample_into(grid, next, v_next, attrs.data())) break;
    if (!is_finite(v_next))
      throw TraceError(TraceError::Kind::non_finite, "non-finite field value during integration");
    arc += length(next - pos);
    elapsed += h;
    pos = next;
    v = v_next;
    push_vertex(half, pos, sign * elapsed, arc, v, attrs);
  }
  return half;
}

}  // namespace

std::vector<Vec3> seed_points(const SeedSpec& spec, const field::VectorFieldGrid& grid) {
  if (!grid.bounds().intersects(spec.region))
    throw TraceError(TraceError::Kind::region_outside, "seed region does not intersect the grid");
  const Box& r = spec.region;
  std::vector<Vec3> points;
  if (spec.strategy == SeedStrategy::uniform_grid) {
    const auto [nx, ny, nz] = spec.dims;
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("seed lattice dims must be >= 1");
    points.reserve(static_cast<std::size_t>(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
          points.push_back({lattice(r.min.x, r.max.x, i, nx), lattice(r.min.y, r.max.y, j, ny),
                            lattice(r.min.z, r.max.z, k, nz)});
    return points;
  }
  if (spec.count < 1) throw std::invalid_argument("seed count must be >= 1");
  std::mt19937_64 rng(spec.rng_seed);
  points.reserve(static_cast<std::size_t>(spec.count));
  const Vec3 ext = r.max - r.min;
  for (int i = 0; i < spec.count; ++i) {
    const double x = unit_double(rng);
    const double y = unit_double(rng);
    const double z = unit_double(rng);
    points.push_back({r.min.x + x * ext.x, r.min.y + y * ext.y, r.min.z + z * ext.z});
  }
  return points;
}

bool satisfies_invariants(const Streamline& line) {
  const auto& v = line.vertices;
  if (v.size() < 2 || line.seed_vertex >= v.size()) return false;
  if (line.attributes.size() != v.size() * line.channel_count) return false;
  if (v[line.seed_vertex].s != 0.0) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i].speed >= 0.0) || !(v[i].s >= 0.0)) return false;
    if (i + 1 < v.size() && !(v[i + 1].t > v[i].t)) return false;
  }
  for (std::size_t i = line.seed_vertex; i + 1 < v.size(); ++i)
    if (v[i + 1].s < v[i].s) return false;
  for (std::size_t i = line.seed_vertex; i > 0; --i)
    if (v[i - 1].s < v[i].s) return false;
  return true;
}

Streamline trace(const field::VectorFieldGrid& grid, const Vec3& seed, const TraceParams& params) {
  if (!(params.step > 0.0) || params.max_steps < 1 || !(params.max_time > 0.0))
    throw TraceError(TraceError::Kind::invalid_params, "trace needs step > 0, max_steps >= 1");

  Streamline line;
  line.channel_count = grid.channels().size();
  const bool fwd = params.direction != Direction::backward;
  const bool bwd = params.direction != Direction::forward;

  if (bwd) {
    HalfTrace back = trace_half(grid, seed, params, -1.0);
    const std::size_t n = back.vertices.size();
    const std::size_t nc = line.channel_count;
    // Reverse so that t increases along the list; the seed ends up last.
    for (std::size_t i = n; i-- > 0;) {
      line.vertices.push_back(back.vertices[i]);
      line.attributes.insert(line.attributes.end(), back.attributes.begin() + i * nc,
                             back.attributes.begin() + (i + 1) * nc);
    }
    line.seed_vertex = n - 1;
  }
  if (fwd) {
    HalfTrace front = trace_half(grid, seed, params, 1.0);
    // Seed vertex is shared when tracing both ways.
    const std::size_t skip = bwd ? 1 : 0;
    const std::size_t nc = line.channel_count;
    if (!bwd) line.seed_vertex = 0;
    line.vertices.insert(line.vertices.end(), front.vertices.begin() + skip, front.vertices.end());
    line.attributes.insert(line.attributes.end(), front.attributes.begin() + skip * nc,
                           front.attributes.end());
  }
  return line;
}

std::size_t StreamlineSet::vertex_count() const {
  std::size_t n = 0;
  for (const auto& l : lines) n += l.size();
  return n;
}

StreamlineSet trace_all(const field::VectorFieldGrid& grid, std::span<const Vec3> seeds,
                        const TraceParams& params, TraceStats* stats, int threads) {
  if (!(params.step > 0.0) || params.max_steps < 1 || !(params.max_time > 0.0))
    throw TraceError(TraceError::Kind::invalid_params, "trace needs step > 0, max_steps >= 1");

  struct Result {
    std::optional<Streamline> line;
    const char* drop_reason = nullptr;
  };
  std::vector<Result> results(seeds.size());
  parallel_for(seeds.size(), threads, [&](std::size_t i) {
    try {
      Streamline l = trace(grid, seeds[i], params);
      if (l.size() < 2) {
        results[i].drop_reason = "too_short";
        return;
      }
      l.seed_index = static_cast<int>(i);
      results[i].line = std::move(l);
    } catch (const TraceError& e) {
      results[i].drop_reason =
          e.kind() == TraceError::Kind::seed_outside ? "seed_outside" : "non_finite";
    }
  });

  StreamlineSet set;
  set.channels = grid.channel_names();
  TraceStats local;
  local.seeds = seeds.size();
  for (auto& r : results) {
    if (r.line) {
      local.vertices += r.line->size();
      set.lines.push_back(std::move(*r.line));
    } else {
      ++local.dropped;
      ++local.drop_reasons[r.drop_reason];
    }
  }
  local.lines = set.lines.size();
  if (stats) *stats = std::move(local);
  return set;
}

// ---------------------------------------------------------------------------

void write_sls(const StreamlineSet& set, std::ostream& out) {
  out << "SLS1 " << set.lines.size();
  for (const auto& c : set.channels) out << ' ' << c;
  out << '\n';
  const std::size_t nc = set.channels.size();
  std::vector<float> row(6 + nc);
  for (const auto& line : set.lines) {
    out << line.size() << '\n';
    for (std::size_t i = 0; i < line.size(); ++i) {
      const StreamVertex& v = line.vertices[i];
      row[0] = static_cast<float>(v.position.x);
      row[1] = static_cast<float>(v.position.y);
      row[2] = static_cast<float>(v.position.z);
      row[3] = static_cast<float>(v.t);
      row[4] = static_cast<float>(v.s);
      row[5] = static_cast<float>(v.speed);
      std::copy_n(line.attributes.begin() + i * nc, nc, row.begin() + 6);
      io::write_f32_le(out, row);
    }
  }
}

StreamlineSet read_sls(std::istream& in) {
  auto fail = [](const std::string& what) -> void { throw Error("SLS: " + what); };
  std::string line;
  if (!std::getline(in, line)) fail("missing header");
  std::istringstream hs(line);
  std::string magic;
  std::size_t count = 0;
  if (!(hs >> magic >> count) || magic != "SLS1") fail("expected 'SLS1 <count> <channels...>'");
  StreamlineSet set;
  for (std::string c; hs >> c;) set.channels.push_back(c);
  const std::size_t nc = set.channels.size();
  std::vector<float> row(6 + nc);
  for (std::size_t l = 0; l < count; ++l) {
    if (!std::getline(in, line)) fail("missing vertex count for line " + std::to_string(l));
    std::size_t n = 0;
    try {
      n = std::stoul(line);
    } catch (const std::exception&) {
      fail("bad vertex count '" + line + "'");
    }
    Streamline sl;
    sl.channel_count = nc;
    sl.seed_index = static_cast<int>(l);
    sl.vertices.reserve(n);
    sl.attributes.reserve(n * nc);
    for (std::size_t i = 0; i < n; ++i) {
      if (io::read_f32_le(in, row) != row.size()) fail("truncated line " + std::to_string(l));
      sl.vertices.push_back({{row[0], row[1], row[2]}, row[3], row[4], row[5]});
      sl.attributes.insert(sl.attributes.end(), row.begin() + 6, row.end());
    }
    std::size_t seed = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (sl.vertices[i].s < sl.vertices[seed].s) seed = i;
    sl.seed_vertex = seed;
    set.lines.push_back(std::move(sl));
  }
  return set;
}

void save_sls(const StreamlineSet& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  write_sls(set, out);
}

StreamlineSet load_sls(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_sls(in);
}

}  // namespace streamstyle::tracer
