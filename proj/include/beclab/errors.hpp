#pragma once

#include <stdexcept>
#include <string>

namespace beclab {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A precondition on an operator or matrix (Hermiticity, positivity, shape) failed.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Truncated space would exceed the configured dimension cap.
class DimensionCapExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Base for failures of a numerical procedure (divergent integrals, missing roots).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InfraredDivergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnsolvableDensity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace beclab
