#pragma once

#include <stdexcept>
#include <string>

namespace rcrl {

/// Shapes of two operands disagree (vector lengths, network dimensions).
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An integration step produced a non-finite state.
class IntegrationOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fixed-point iteration ran out of sweeps before reaching its tolerance.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// A loss or gradient became NaN/inf.
class NonFiniteValue : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration. `field` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace rcrl
