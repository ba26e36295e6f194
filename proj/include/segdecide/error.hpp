#pragma once

#include <stdexcept>
#include <string>

namespace segdecide {

/// Base class for every error raised by the library. The CLI maps all of
/// these to the "data/format error" exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or truncated file, bad magic, unsupported version.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A container invariant does not hold (e.g. a posterior that does not sum to one).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree in height, width or class count do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter value or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace segdecide
