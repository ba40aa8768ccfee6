#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model name, parameter, or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver produced a non-finite state.
class BlowUpError : public Error {
 public:
  BlowUpError(std::size_t step, const std::string& what)
      : Error(what), step_(step) {}

  /// Index of the first step whose output was non-finite.
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Two paths or controls live on different time grids.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// V(x) = 0 while the diffusion pairing <sigma, V_x> is nonzero.
class SingularQuotientError : public Error {
 public:
  using Error::Error;
};

/// An audit could not evaluate its inequality (empty region, non-finite
/// sample, non-positive modulus).
class AuditError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldp
