// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace streamstyle {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public Error {
 public:
  enum class Kind { io, malformed_header, length_mismatch, non_finite };

  LoadError(Kind kind, std::string channel, std::uint64_t offset, const std::string& what)
      : Error(what), kind_(kind), channel_(std::move(channel)), offset_(offset) {}

  Kind kind() const { return kind_; }
  // Channel being read when the error occurred ("velocity" for the vector array, empty for header).
  const std::string& channel() const { return channel_; }
  // Element offset within that channel's array.
  std::uint64_t offset() const { return offset_; }

 private:
  Kind kind_;
  std::string channel_;
  std::uint64_t offset_;
};

class TraceError : public Error {
 public:
  enum class Kind { seed_outside, non_finite, invalid_params, region_outside };

  TraceError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// Unknown channel, colormap, style id or an invariant violation in a style definition.
class StyleError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamstyle
