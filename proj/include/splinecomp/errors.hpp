#pragma once

#include <stdexcept>
#include <string>

namespace splinecomp {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Adaptive quadrature ran out of subdivisions. Carries the best estimate so
/// callers can decide whether it is still usable.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double estimate, double error)
      : std::runtime_error(what), estimate_(estimate), error_(error) {}

  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

/// The spline or configuration cannot produce a valid quantizer
/// (non-monotone fit, unreachable target, failed inversion, ...).
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure did not converge within its cap.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace splinecomp
