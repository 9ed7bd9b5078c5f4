// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

// Little-endian float32 array I/O shared by the SFG and SLS formats.
namespace streamstyle::io {

inline std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

inline void write_f32_le(std::ostream& out, std::span<const float> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(float)));
  } else {
    for (float f : values) {
      std::uint32_t u = byteswap32(std::bit_cast<std::uint32_t>(f));
      out.write(reinterpret_cast<const char*>(&u), sizeof u);
    }
  }
}

// Fills `out` from the stream; returns the number of complete values read.
inline std::size_t read_f32_le(std::istream& in, std::span<float> out) {
  in.read(reinterpret_cast<char*>(out.data()),
          static_cast<std::streamsize>(out.size() * sizeof(float)));
  const auto got = static_cast<std::size_t>(in.gcount()) / sizeof(float);
  if constexpr (std::endian::native != std::endian::little) {
    for (std::size_t i = 0; i < got; ++i)
      out[i] = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(out[i])));
  }
  return got;
}

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace streamstyle::io
