#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpcac {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position()` is a 0-based byte offset.
class ParseError : public Error {
 public:
  enum class Kind { Syntax, UnknownIdentifier, VariableOutOfRange };

  ParseError(Kind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  Kind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Expression evaluated outside the domain of one of its functions
/// (log of a nonpositive value, sqrt of a negative value, division by zero).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A document (problem, point, multipliers, config) does not match its schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent dimensions, sign-constraint violations, invalid index sets.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A point that must be feasible is not.
class InfeasiblePoint : public Error {
 public:
  using Error::Error;
};

/// A brute-force enumeration cap was exceeded.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace mpcac
