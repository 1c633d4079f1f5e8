#pragma once

#include <stdexcept>
#include <string>

namespace ringbec {

/// Invalid or inconsistent user configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver breakdown, NaN, non-admissible mesh and similar (CLI exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ringbec
