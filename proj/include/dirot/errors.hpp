#pragma once

#include <stdexcept>
#include <string>

namespace dirot {

/// Precondition or representation violation (bad masses, unequal totals, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// No directional plan exists; `location()` is where the dominance fails.
class DominanceError : public DomainError {
 public:
  DominanceError(const std::string& what, double location)
      : DomainError(what), location_(location) {}
  double location() const { return location_; }

 private:
  double location_;
};

/// Malformed input text.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A cost function produced a non-finite value.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid displacement function for a cone constraint.
class ConstraintError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace dirot
