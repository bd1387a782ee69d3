#pragma once
#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinframe {

// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lexical/syntactic failure while parsing an expression. `offset` is the
// byte position in the source string.
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " (offset " + std::to_string(offset) + ")"), offset(offset) {}
  std::size_t offset;
};

// Evaluation left the domain of a function (sqrt of a negative, division
// by zero, singular gauge) or an input violated a runtime contract.
struct DomainError : Error {
  using Error::Error;
};

// Structural misuse of the algebra: signature mismatch, odd-grade input to
// an even-only operation, grade contract violations.
struct AlgebraError : Error {
  using Error::Error;
};

// An iterative method failed to converge.
struct ConvergenceError : Error {
  using Error::Error;
};

// A job file failed schema validation.
struct SchemaError : Error {
  using Error::Error;
};

}  // namespace spinframe
