#pragma once

#include <stdexcept>
#include <string>

namespace smd {

// Every error raised by the library derives from Error so callers (the CLI in
// particular) can map families of failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point lies outside the domain of a mirror map (e.g. a non-positive
// coordinate for negative entropy) or outside the set a cone is taken at.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedPairing : public Error {
 public:
  using Error::Error;
};

class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedInnerSolve : public Error {
 public:
  using Error::Error;
};

class NoReferenceSaddle : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace smd
