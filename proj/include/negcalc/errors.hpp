// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace negcalc {

// Requested a trace-norm derivative at a (numerically) singular argument.
// Carries the smallest absolute eigenvalue so callers can report how close
// the argument was to the cutoff instead of fabricating a derivative.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double min_abs_eig)
      : std::runtime_error(what), min_abs_eig_(min_abs_eig) {}

  double min_abs_eig() const noexcept { return min_abs_eig_; }

 private:
  double min_abs_eig_;
};

// An argument violates a structural requirement: Hermiticity, unit trace,
// positive semidefiniteness, or tracelessness.
class PatternViolationError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A closed-form expression was evaluated at a separable instant where its
// denominator vanishes.
class SeparablePointError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace negcalc
