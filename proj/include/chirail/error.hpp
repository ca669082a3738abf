#pragma once

#include <stdexcept>
#include <string>

namespace chirail {

/// Base class for all pipeline errors. Messages are meant to be surfaced
/// verbatim to the CLI user, so they name the offending column, line or path.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace chirail
