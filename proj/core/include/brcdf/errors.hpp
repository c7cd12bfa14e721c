#pragma once

#include <stdexcept>
#include <string>

namespace brcdf {

/// Invalid configuration or user input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: singular factorization, non-convergence, non-finite
/// values. The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace brcdf
