#pragma once

#include <stdexcept>
#include <string>

namespace mbfpca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite input, dimension mismatch or a violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Data that makes a quantity undefined (zero bandwidth, constant column,
/// single-class labels, zero-trace covariance).
class DegenerateData : public Error {
 public:
  using Error::Error;
};

/// V + t*xi lost rank; the caller is expected to shrink the step.
class RetractionFailure : public Error {
 public:
  using Error::Error;
};

/// Line search exhausted its backtracks at a point that is not stationary.
class SolverStall : public Error {
 public:
  SolverStall(const std::string& what, double grad_norm, double step, int iterations)
      : Error(what), grad_norm(grad_norm), last_step(step), iterations(iterations) {}

  double grad_norm;
  double last_step;
  int iterations;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
      : Error(what), row(row), column(column) {}

  std::size_t row;
  std::size_t column;
};

/// A protected group would vanish from one side of a train/test split.
class StratificationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mbfpca
