#pragma once

#include <stdexcept>
#include <string>

namespace qpn {

// Base of every error raised by the library.  The CLI maps each subclass to
// its own exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed network document (bad JSON, wrong key types).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what), offset_(byte_offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed input that breaks a structural or numeric constraint.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A query whose preconditions do not hold (zero-probability evidence,
// dependent causes, observed query variable, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// An input too large for the exact algorithms (state-space or dimension cap).
class LimitError : public Error {
 public:
  using Error::Error;
};

}  // namespace qpn
