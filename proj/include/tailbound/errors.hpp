#pragma once

#include <stdexcept>
#include <string>

namespace tailbound {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: invalid distribution parameters, y on the wrong side
/// of the mean, malformed spec strings.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A cumulant was evaluated at or beyond the edge of its domain.
class DomainError : public Error {
 public:
  DomainError(double xi, double xi_star);
  double xi() const { return xi_; }
  double xi_star() const { return xi_star_; }

 private:
  double xi_;
  double xi_star_;
};

/// A target value lies outside the range of K'.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A root bracket without a certified sign change.
class BracketError : public Error {
 public:
  using Error::Error;
};

/// An iterative routine hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A quantity that is provably nonnegative (or otherwise constrained) came
/// out of the solvers violating that constraint by more than rounding.
class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A formula was evaluated exactly at a removable singularity, e.g. the
/// optimal-delta formula with A == 1.
class DegenerateArgumentError : public Error {
 public:
  using Error::Error;
};

}  // namespace tailbound
