#pragma once

#include <stdexcept>
#include <string>

namespace pemda {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: bad parameters, malformed configuration, mismatched grids.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity handed to a transform.
class NonFiniteError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// The barotropic solvability condition needed for a periodic vertical
/// component is violated. `residual` is the offending z-mean magnitude.
class SolvabilityError : public Error {
 public:
  SolvabilityError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// An external trajectory (observations or base state) is missing or not
/// aligned with the time being evaluated.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while integrating.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, double time) : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pemda
