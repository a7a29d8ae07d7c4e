#pragma once

#include <stdexcept>
#include <string>

namespace trio {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, out-of-range settings.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Missing, malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure (singular system, zero deviation, non-finite result).
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace trio
