#pragma once

#include <stdexcept>
#include <string>

namespace effsize {

// Root of every error raised by the library. Subclasses map onto the
// CLI exit-code classes (see commands.hpp).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Dimensions or lengths of inputs do not line up.
class InputShapeError : public Error {
public:
  using Error::Error;
};

// A parameter lies outside the mathematical domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

// Matrix too close to singular for its inverse to be meaningful.
class NearSingularError : public Error {
public:
  NearSingularError(const std::string& what, double rcond)
      : Error(what), reciprocal_condition_(rcond) {}

  double reciprocal_condition() const noexcept { return reciprocal_condition_; }

private:
  double reciprocal_condition_;
};

// Some outcome with positive probability wipes out the investor's wealth.
class BankruptcyError : public Error {
public:
  using Error::Error;
};

// Exact enumeration requested beyond the supported asset count.
class EnumerationLimitError : public Error {
public:
  using Error::Error;
};

// Interpolation target falls outside the tabulated range.
class ExtrapolationError : public Error {
public:
  ExtrapolationError(const std::string& what, double nearest_bound)
      : Error(what), nearest_bound_(nearest_bound) {}

  double nearest_bound() const noexcept { return nearest_bound_; }

private:
  double nearest_bound_;
};

// Malformed input text; line is 1-based, 0 when unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// Well-formed input whose values are unusable (nonpositive prices, ...).
class DataError : public Error {
public:
  using Error::Error;
};

}  // namespace effsize
