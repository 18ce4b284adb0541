#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace symlift {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed model or mismatched sizes (out-of-range variable, wrong
/// assignment length, duplicate literal, ...).
class StructuralError : public Error {
public:
  using Error::Error;
};

/// Invalid generator or command parameters.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Model text could not be parsed. Carries a 1-based line and column.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string &what)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

/// A mathematical invariant or feasibility condition does not hold.
class InvariantError : public Error {
public:
  using Error::Error;
};

class EvidenceNotInvariant : public InvariantError {
public:
  using InvariantError::InvariantError;
};

class NonDivisibleOrder : public InvariantError {
public:
  using InvariantError::InvariantError;
};

class NoSatisfyingState : public InvariantError {
public:
  using InvariantError::InvariantError;
};

class AllZeroMass : public InvariantError {
public:
  using InvariantError::InvariantError;
};

class InitViolatesHard : public InvariantError {
public:
  using InvariantError::InvariantError;
};

/// A configured resource cap would be exceeded.
class CapExceeded : public Error {
public:
  using Error::Error;
};

class OrderExceedsCap : public CapExceeded {
public:
  using CapExceeded::CapExceeded;
};

class StateSpaceTooLarge : public CapExceeded {
public:
  using CapExceeded::CapExceeded;
};

} // namespace symlift
