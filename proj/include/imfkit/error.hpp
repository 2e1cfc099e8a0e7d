#pragma once

#include <stdexcept>
#include <string>

namespace imfkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input: geometry out of range, mismatched sizes, malformed files.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Image file could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A table or spec that is well-formed but cannot be processed.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace imfkit
