#pragma once

#include <stdexcept>
#include <string>

namespace semithermo {

// Bad input: malformed JSON, inconsistent dimensions, violated preconditions
// that a caller could have checked. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: root solver did not converge, power iteration stalled,
// leak beyond the hard bound. CLI exit code 3.
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// A residual crossed its acceptance tolerance. CLI exit code 4.
class ResidualError : public std::runtime_error {
public:
  explicit ResidualError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semithermo
