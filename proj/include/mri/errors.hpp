#pragma once

#include <stdexcept>
#include <string>

namespace mri {

/// A computation could not produce a trustworthy result (divergence,
/// singular inner solve, non-finite state).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An operation was called on a plant that violates the standing
/// assumption of the result it implements, e.g. (A, B) not controllable.
class HypothesisViolation : public std::invalid_argument {
 public:
  explicit HypothesisViolation(const std::string& what)
      : std::invalid_argument("hypothesis violated: " + what) {}
};

}  // namespace mri
