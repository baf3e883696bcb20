#pragma once

#include <stdexcept>
#include <string>

namespace avgh {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. CLI exit code 1.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Well-formed input that breaks an invariant. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failure inside a numerical operation. CLI exit code 3.
class NumericalError : public Error {
 public:
  NumericalError(std::string operation, const std::string& what)
      : Error(operation + ": " + what), operation_(std::move(operation)) {}
  const std::string& operation() const { return operation_; }

 private:
  std::string operation_;
};

#define AVGH_VALIDATION_ERROR(Name)       \
  class Name : public ValidationError {   \
   public:                                \
    using ValidationError::ValidationError; \
  };

#define AVGH_NUMERICAL_ERROR(Name)        \
  class Name : public NumericalError {    \
   public:                                \
    using NumericalError::NumericalError; \
  };

AVGH_VALIDATION_ERROR(MissingObservation)
AVGH_VALIDATION_ERROR(MissingControl)
AVGH_VALIDATION_ERROR(IndexOrder)
AVGH_VALIDATION_ERROR(NegativeWeight)
AVGH_VALIDATION_ERROR(BoundaryViolation)
AVGH_VALIDATION_ERROR(NonPositiveKappa)

AVGH_NUMERICAL_ERROR(StepTooLarge)
AVGH_NUMERICAL_ERROR(SingularPropagator)
AVGH_NUMERICAL_ERROR(SingularFinalState)
AVGH_NUMERICAL_ERROR(MuTooLarge)
AVGH_NUMERICAL_ERROR(QuadratureFailure)

#undef AVGH_VALIDATION_ERROR
#undef AVGH_NUMERICAL_ERROR

}  // namespace avgh
