// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include "streamstyle/binary_io.hpp"
#include "streamstyle/error.hpp"
#include "streamstyle/field.hpp"

namespace streamstyle::field {

namespace {

[[noreturn]] void header_error(const std::string& what) {
  throw LoadError(LoadError::Kind::malformed_header, "", 0, "SFG header: " + what);
}

template <typename T>
T parse_number(const std::string& token, const char* field) {
  T value{};
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    header_error(std::string("cannot parse ") + field + " from '" + token + "'");
  return value;
}

void read_channel(std::istream& in, const std::string& name, std::vector<float>& out) {
  const std::size_t got = io::read_f32_le(in, out);
  if (got != out.size()) {
    throw LoadError(LoadError::Kind::length_mismatch, name, got,
                    "SFG array '" + name + "' truncated: expected " + std::to_string(out.size()) +
                        " values, found " + std::to_string(got));
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) {
      throw LoadError(LoadError::Kind::non_finite, name, i,
                      "SFG array '" + name + "' has a non-finite value at offset " +
                          std::to_string(i));
    }
  }
}

}  // namespace

SfgHeader read_sfg_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) header_error("missing header line");
  std::istringstream ls(line);
  std::vector<std::string> tok;
  for (std::string t; ls >> t;) tok.push_back(t);
  if (tok.size() != 11 || tok[0] != "SFG1")
    header_error("expected 'SFG1 nx ny nz ox oy oz sx sy sz C', got '" + line + "'");

  SfgHeader h;
  h.dims = {parse_number<int>(tok[1], "nx"), parse_number<int>(tok[2], "ny"),
            parse_number<int>(tok[3], "nz")};
  h.origin = {parse_number<double>(tok[4], "ox"), parse_number<double>(tok[5], "oy"),
              parse_number<double>(tok[6], "oz")};
  h.spacing = {parse_number<double>(tok[7], "sx"), parse_number<double>(tok[8], "sy"),
               parse_number<double>(tok[9], "sz")};
  const int count = parse_number<int>(tok[10], "C");
  if (h.dims.nx < 2 || h.dims.ny < 2 || h.dims.nz < 2) header_error("dims must be >= 2");
  if (!(h.spacing.x > 0 && h.spacing.y > 0 && h.spacing.z > 0))
    header_error("spacing must be positive");
  if (!is_finite(h.origin) || !is_finite(h.spacing)) header_error("non-finite origin/spacing");
  if (count < 0) header_error("negative channel count");

  for (int c = 0; c < count; ++c) {
    if (!std::getline(in, line)) header_error("missing channel line " + std::to_string(c));
    constexpr std::string_view prefix = "channel ";
    if (line.rfind(prefix, 0) != 0 || line.size() == prefix.size())
      header_error("expected 'channel <name>', got '" + line + "'");
    std::string name = line.substr(prefix.size());
    if (name.find_first_of(" \t\r") != std::string::npos)
      header_error("channel name contains whitespace: '" + name + "'");
    for (const auto& existing : h.channels)
      if (existing == name) header_error("duplicate channel '" + name + "'");
    h.channels.push_back(std::move(name));
  }
  if (!std::getline(in, line) || !line.empty()) header_error("missing blank line after header");
  return h;
}

SfgHeader read_sfg_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::io, "", 0, "cannot open '" + path.string() + "'");
  return read_sfg_header(in);
}

VectorFieldGrid read_sfg(std::istream& in) {
  SfgHeader h = read_sfg_header(in);
  const std::size_t n = h.dims.count();
  std::vector<float> velocity(3 * n);
  read_channel(in, "velocity", velocity);
  std::vector<VectorFieldGrid::Channel> channels;
  channels.reserve(h.channels.size());
  for (auto& name : h.channels) {
    std::vector<float> values(n);
    read_channel(in, name, values);
    channels.push_back({std::move(name), std::move(values)});
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    const std::string last = channels.empty() ? "velocity" : channels.back().name;
    throw LoadError(LoadError::Kind::length_mismatch, last, channels.empty() ? 3 * n : n,
                    "SFG file has trailing data after array '" + last + "'");
  }
  return VectorFieldGrid(h.dims, h.origin, h.spacing, std::move(velocity), std::move(channels));
}

void write_sfg(const VectorFieldGrid& grid, std::ostream& out) {
  const auto& d = grid.dims();
  out << "SFG1 " << d.nx << ' ' << d.ny << ' ' << d.nz;
  for (const Vec3* v : {&grid.origin(), &grid.spacing()})
    for (int a = 0; a < 3; ++a) out << ' ' << io::format_double((*v)[a]);
  out << ' ' << grid.channels().size() << '\n';
  for (const auto& c : grid.channels()) out << "channel " << c.name << '\n';
  out << '\n';
  io::write_f32_le(out, grid.velocity());
  for (const auto& c : grid.channels()) io::write_f32_le(out, c.values);
}

VectorFieldGrid load_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadError::Kind::io, "", 0, "cannot open '" + path.string() + "'");
  return read_sfg(in);
}

void save_grid(const VectorFieldGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError(LoadError::Kind::io, "", 0, "cannot write '" + path.string() + "'");
  write_sfg(grid, out);
  if (!out) throw LoadError(LoadError::Kind::io, "", 0, "write failed for '" + path.string() + "'");
}

}  // namespace streamstyle::field
