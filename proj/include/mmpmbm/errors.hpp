#pragma once

#include <stdexcept>
#include <string>

namespace mmpmbm {

/// Invalid model/scenario/filter configuration (dimension mismatch,
/// non-stochastic TPM row, bad threshold, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure during filtering (singular innovation covariance, ...).
class NumericError : public std::runtime_error {
public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mmpmbm
