#pragma once

#include <stdexcept>
#include <string>

namespace slepf {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition on structured input (e.g. a missing link) was violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Request exceeds a hard size guard.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Parameter combination that the library deliberately does not evaluate.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// kappa sits on (or numerically next to) a rational resonance of a q-number formula.
class ResonanceError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A discretization parameter is too coarse for the requested geometry.
class RefinementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative or adaptive scheme did not reach its tolerance.
class ToleranceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stopped Loewner evolution failed to satisfy its stopping rule.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(const std::string& what, long sample_index = -1, double capacity = 0.0)
      : std::runtime_error(what), sample_index_(sample_index), capacity_(capacity) {}
  long sample_index() const { return sample_index_; }
  double capacity() const { return capacity_; }

 private:
  long sample_index_;
  double capacity_;
};

/// Internal consistency failure of a lattice or combinatorial routine.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace slepf
