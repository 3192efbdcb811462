#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specrank {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input or violated precondition. The CLI maps these to exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine could not produce a result. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class FileNotFound : public InputError {
 public:
  explicit FileNotFound(const std::string& path)
      : InputError("file not found: " + path) {}
};

/// Non-numeric, missing or surplus cell. Row and column are 1-based.
class ParseError : public InputError {
 public:
  ParseError(std::size_t row, std::size_t col, const std::string& what)
      : InputError("parse error at row " + std::to_string(row) + ", column " +
                   std::to_string(col) + ": " + what),
        row_(row),
        col_(col) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t col() const noexcept { return col_; }

 private:
  std::size_t row_;
  std::size_t col_;
};

class EmptyMatrix : public InputError {
 public:
  EmptyMatrix() : InputError("matrix has no rows or no columns") {}
};

class NotCentered : public InputError {
 public:
  NotCentered() : InputError("matrix columns must be centered first") {}
};

class ShapeMismatch : public InputError {
 public:
  using InputError::InputError;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class SeriesTooShort : public InputError {
 public:
  using InputError::InputError;
};

class SeriesTooLong : public InputError {
 public:
  using InputError::InputError;
};

class PriorLengthMismatch : public InputError {
 public:
  using InputError::InputError;
};

class ConvergenceFailure : public NumericalError {
 public:
  explicit ConvergenceFailure(int iterations)
      : NumericalError("eigensolver did not converge after " +
                       std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class DegenerateSpectrum : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateScale : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace specrank
