#pragma once

#include <stdexcept>
#include <string>

namespace ubic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on user-supplied parameters was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A pipeline configuration file is malformed or inconsistent.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A file could not be parsed or does not match its header.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Integration blow-up, ill-conditioning and similar numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ubic
