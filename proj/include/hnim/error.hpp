#pragma once

#include <stdexcept>
#include <string>

namespace hnim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or unsupported configuration, surfaced before any work runs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A subcarrier activation pattern that is not part of the codebook.
class IllegalPatternError : public Error {
 public:
  using Error::Error;
};

}  // namespace hnim
