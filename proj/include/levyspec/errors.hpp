#pragma once

#include <stdexcept>
#include <string>

namespace levyspec {

// Invalid user-supplied configuration or precondition violation.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure (non-convergence, budget exceeded, invariant breach).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace levyspec
