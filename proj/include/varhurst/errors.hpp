#pragma once

#include <stdexcept>
#include <string>

namespace varhurst {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (H outside (0,1), x outside [0,1], ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A custom profile whose declared metadata disagrees with its evaluator.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Query beyond the discretization-converged range of a spectrum.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double max_admissible)
      : Error(what), max_admissible_(max_admissible) {}
  double max_admissible() const noexcept { return max_admissible_; }

 private:
  double max_admissible_;
};

/// Frequency cut-off too small for the requested counting range.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double required_xi_max)
      : Error(what), required_xi_max_(required_xi_max) {}
  double required_xi_max() const noexcept { return required_xi_max_; }

 private:
  double required_xi_max_;
};

/// The profile violates an assumption of the small-ball theorems.
class NotCoveredError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double estimate, double error_estimate)
      : Error(what), estimate_(estimate), error_estimate_(error_estimate) {}
  double estimate() const noexcept { return estimate_; }
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double estimate_;
  double error_estimate_;
};

/// Level-measure regression rejected because the measured data are not monotone.
class FitQualityError : public Error {
 public:
  FitQualityError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class LinalgError : public Error {
 public:
  using Error::Error;
};

/// Computed spectrum and asymptotic tail model disagree at the splice point.
class SpliceError : public Error {
 public:
  SpliceError(const std::string& what, double mismatch) : Error(what), mismatch_(mismatch) {}
  double mismatch() const noexcept { return mismatch_; }

 private:
  double mismatch_;
};

/// Cholesky failed even after the maximal diagonal jitter.
class PsdError : public Error {
 public:
  using Error::Error;
};

}  // namespace varhurst
