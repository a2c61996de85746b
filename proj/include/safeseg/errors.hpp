#pragma once

#include <stdexcept>
#include <string>

namespace safeseg {

// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration: malformed hierarchy documents, unknown class or set
// names, invalid option values. CLI exit code 4.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad evaluation inputs: shape mismatches, unknown pixel values, missing
// predictions, undecodable submissions. CLI exit code 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem trouble: unreadable roots, unwritable outputs. CLI exit code 3.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace safeseg
