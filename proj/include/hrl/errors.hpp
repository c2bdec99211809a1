#pragma once

#include <stdexcept>
#include <string>

namespace hrl {

// Bad user-facing configuration (CLI flags, config files, experiment setup).
// Maps to exit code 1 in the CLI.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown (e.g. a posterior variance far below zero). Signals a
// broken covariance factor rather than a user mistake. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hrl
