#pragma once

#include <stdexcept>
#include <string>

namespace apf {

// Base of every library failure. The CLI maps these to exit status 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidPatternError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

// Argument outside the documented domain of a formula (n out of [1, 49], u <= F, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (pattern, PGM, PSF, prior, config).
class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Depth label that has no kernel in the bank.
class LegendError : public Error {
 public:
  using Error::Error;
};

}  // namespace apf
