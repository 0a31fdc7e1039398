#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace germfib {

/// Malformed or out-of-contract user input (germ files, CLI values, preconditions).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text that failed to parse, with a 1-based source position.
class ParseError : public InputError {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : InputError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// The requested analysis does not apply to this germ (e.g. p < 2 for sphere fibrations).
class UnsupportedError : public InputError {
 public:
  using InputError::InputError;
};

/// An internal consistency check failed; indicates a bug rather than bad input.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace germfib
