#pragma once

#include <stdexcept>
#include <string>

namespace pdmplab {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument violates a documented invariant (bad rates, point outside
/// the admissible set, malformed input file, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An exponential would overflow a double.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Iteration did not reach its tolerance. Carries the last residual.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Too few samples to support an estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A general affine system that cannot be brought into canonical form.
class UnsupportedSystemError : public Error {
 public:
  using Error::Error;
};

/// A numerical post-check failed (replay residual, Newton failure, ...).
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Root solve landed outside the requested branch or no root exists.
class NoSolutionError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Kernel evaluation refused because the switch point is too close to
/// the diagonal.
class NearDiagonalError : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace pdmplab
