#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rosyn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input. `position` is a 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// A configurable size cap was exceeded (automaton states, product size).
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Matrix/vector shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical precondition failed (instability, singularity, non-convergence).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace rosyn
