#pragma once

#include <stdexcept>
#include <string>

namespace qmet {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct ShapeError : Error {
  using Error::Error;
};

// A constructed object fails one of its declared invariants.
struct ValidationError : Error {
  using Error::Error;
};

struct NumericalError : Error {
  using Error::Error;
};

// State mass has leaked past the trustworthy part of the truncated basis.
struct TruncationOverflow : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qmet
