#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace oprelay {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Structurally invalid call, e.g. an empty relay set or a geometry that
/// contradicts the declared timing maxima.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Experiment configuration rejected during validation. `field()` is a
/// JSON-pointer-like path to the offending entry ("/timing/switch_us").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical procedure failed to reach the requested precision.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& message, double partial_estimate = 0.0,
               double error_estimate = 0.0)
      : std::runtime_error(message),
        partial_estimate_(partial_estimate),
        error_estimate_(error_estimate) {}

  double partial_estimate() const noexcept { return partial_estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double partial_estimate_;
  double error_estimate_;
};

/// A Monte Carlo estimate needed downstream came out as exactly zero.
class InsufficientTrialsError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace oprelay
