#pragma once

#include <stdexcept>
#include <string>

namespace sscat {

/// Invalid physical or dimensionless input (δ ≥ 1, ε ≤ 0, non-propagating tails, ...).
class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to deliver a certified number.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Evaluation too close to a pole of an analytic shape.
class PoleError : public NumericError {
public:
  using NumericError::NumericError;
};

/// Wrong use of an API (complex argument on tabulated data, unsupported family, ...).
class UsageError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Inconsistent configuration (insufficient modes, taper wider than sample, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace sscat
