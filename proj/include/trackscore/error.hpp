#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace trackscore {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit codes (validation failures -> 1, I/O -> 2).
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidGeometry : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

class ParseError : public FormatError {
public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : FormatError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
public:
  using Error::Error;
};

class SizeError : public Error {
public:
  using Error::Error;
};

class LookupError : public Error {
public:
  using Error::Error;
};

// A sidecar record refers to a detection that does not exist (or vice versa).
class ReferenceError : public Error {
public:
  using Error::Error;
};

class UndefinedValue : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace trackscore
