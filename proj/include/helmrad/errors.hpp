#pragma once

#include <stdexcept>
#include <string>

namespace helmrad {

/// Argument outside the domain of an operation (out-of-range evaluation point,
/// nonpositive Bessel argument, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input violates a documented precondition (wrong sign of Q on an interval,
/// unsupported potential, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An adaptive procedure failed to converge on [a, b].
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double a, double b, double residual = 0.0)
      : std::runtime_error(what), a_(a), b_(b), residual_(residual) {}

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double residual() const noexcept { return residual_; }

 private:
  double a_;
  double b_;
  double residual_;
};

/// A Bessel value is not representable in double precision.  The log of its
/// magnitude is carried so callers can switch to the scaled interface.
class ScaledOverflowError : public std::overflow_error {
 public:
  ScaledOverflowError(const std::string& what, double log_magnitude)
      : std::overflow_error(what), log_magnitude_(log_magnitude) {}

  double log_magnitude() const noexcept { return log_magnitude_; }

 private:
  double log_magnitude_;
};

/// A 2x2 continuity system at an interval boundary is numerically singular.
class StitchingError : public std::runtime_error {
 public:
  StitchingError(const std::string& what, double point)
      : std::runtime_error(what), point_(point) {}

  double point() const noexcept { return point_; }

 private:
  double point_;
};

/// The mode-matching determinant for mode n is too small to divide by.
class IllConditionedModeError : public std::runtime_error {
 public:
  IllConditionedModeError(const std::string& what, int mode)
      : std::runtime_error(what), mode_(mode) {}

  int mode() const noexcept { return mode_; }

 private:
  int mode_;
};

}  // namespace helmrad
