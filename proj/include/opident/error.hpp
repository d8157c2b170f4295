#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace opident {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric parameter: arity, degree, prime, vector length, ...
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument position outside the valid range of a partial composition.
class PositionError : public Error {
 public:
  using Error::Error;
};

/// Operation undefined on its input, e.g. the zero polynomial.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Lex comparison between monomials of different (arity, degree, multiplicity).
class ComparisonDomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  /// 1-based line of the offending input, or 0 when not line-oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace opident
