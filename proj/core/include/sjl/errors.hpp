#pragma once

#include <stdexcept>

namespace sjl {

// Base of every error raised by the library. The command-line tool maps the
// concrete subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment description.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An angle reduction (or a stretched-exponential gap) needs more bits than the
// active precision policy provides.
class PrecisionError : public Error {
 public:
  using Error::Error;
};

// An operation was called outside its domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace sjl
