#pragma once

#include <stdexcept>
#include <string>

namespace skelgait {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; the message names the offending line or record.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed data violating a domain invariant (non-finite coordinate, bad joint count).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

/// Tensor or matrix dimensions that do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace skelgait
