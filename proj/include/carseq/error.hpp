#pragma once

#include <stdexcept>
#include <string>

namespace carseq {

// Base of every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Precondition violated by caller-supplied data (dimension mismatch, bad counts).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Raised when two values that must be ordered are not (e.g. bound above incumbent).
class Inconsistency : public Error {
 public:
  using Error::Error;
};

class GenerationFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateData : public Error {
 public:
  using Error::Error;
};

// An operation refused to run because its input is too large for it.
class Refusal : public Error {
 public:
  using Error::Error;
};

}  // namespace carseq
