#pragma once

#include <stdexcept>
#include <string>

namespace siftshadow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: parameters, preconditions the caller can fix. CLI exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure did not reach its certificate. CLI exit status 3.
class SolverError : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public SolverError {
 public:
  SingularMatrix() : SolverError("singular linear map") {}
  using SolverError::SolverError;
};

class BadParameters : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotPeriodic : public ValidationError {
 public:
  NotPeriodic(double point, int period, double defect)
      : ValidationError("point " + std::to_string(point) + " is not periodic with period " +
                        std::to_string(period) + " (defect " + std::to_string(defect) + ")"),
        point_(point),
        period_(period) {}
  double point() const noexcept { return point_; }
  int period() const noexcept { return period_; }

 private:
  double point_;
  int period_;
};

class NotGammaString : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NotQuasiExpanding : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Carries which hypothesis of the bad-string extraction failed.
class HypothesesNotMet : public ValidationError {
 public:
  HypothesesNotMet(std::string which, const std::string& detail)
      : ValidationError("hypothesis (" + which + ") not met: " + detail), which_(std::move(which)) {}
  const std::string& which() const noexcept { return which_; }

 private:
  std::string which_;
};

class GapTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DepthTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DepthTooSmall : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ContractionFailed : public SolverError {
 public:
  using SolverError::SolverError;
};

class NoHyperbolicTimes : public SolverError {
 public:
  using SolverError::SolverError;
};

class NoRecurrence : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace siftshadow
