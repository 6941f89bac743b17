#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace disjax {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violated a domain invariant (bad IRI, empty label, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Syntactically broken input; positions are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Bad configuration or command usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Well-formed but unusable input (missing prediction, empty gold set, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Network-level failure talking to the oracle endpoint.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The endpoint answered, but not with a usable chat completion.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant did not hold; always a bug, never user error.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace disjax
