#pragma once

#include <stdexcept>
#include <string>

namespace maxhedge {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An energy outside [0, 1].
class InvalidEnergyError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise malformed numeric input.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Vector lengths disagree with the number of actions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Problem size exceeds what an exhaustive routine is willing to enumerate.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed stream, trace or config text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : ParseError(what, 0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace maxhedge
