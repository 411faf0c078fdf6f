#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cpcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (x <= 0 for a pdf,
/// u outside [0,1], invalid parameters, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A likelihood term could not be evaluated at observation `index` (1-based).
class ObservationError : public DomainError {
 public:
  ObservationError(std::size_t index, const std::string& what)
      : DomainError("t=" + std::to_string(index) + ": " + what), index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Clayton with negative dependence evaluated outside u^-a + v^-a - 1 > 0.
class IndicatorViolation : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Bracketed root finding ran out of iterations.
class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class SingularHessian : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class AllProfilesFailed : public Error {
 public:
  using Error::Error;
};

class IOError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error("row " + std::to_string(row) + ", column " + std::to_string(column) + ": " + what),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

}  // namespace cpcm
