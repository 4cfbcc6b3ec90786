#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hubscan {

/// Base of all hubscan exceptions. `op()` names the operation that failed.
class Error : public std::runtime_error {
 public:
  Error(std::string op, const std::string& message)
      : std::runtime_error(op + ": " + message), op_(std::move(op)) {}

  const std::string& op() const noexcept { return op_; }

 private:
  std::string op_;
};

/// Bad arguments, sizes, or configuration caught before any computation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Failures arising from the numerical content of the inputs.
class NumericError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientSamplesError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidSError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EmptyTruthError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NoNonHubsError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingScreenSizeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonFiniteError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotPositiveDefiniteError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Carries the index of the offending variable.
class ZeroVarianceError : public NumericError {
 public:
  ZeroVarianceError(std::string op, int index)
      : NumericError(std::move(op),
                     "variable " + std::to_string(index) +
                         " has non-positive variance"),
        index_(index) {}

  int index() const noexcept { return index_; }

 private:
  int index_;
};

class NonPositiveDenominatorError : public NumericError {
 public:
  using NumericError::NumericError;
};

class DegenerateGraphError : public NumericError {
 public:
  using NumericError::NumericError;
};

}  // namespace hubscan
