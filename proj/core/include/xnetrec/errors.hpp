#pragma once

#include <stdexcept>
#include <string>

namespace xnetrec {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input data (files, records, identifiers).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Tensor or vector dimensions that do not chain.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite loss or gradient encountered during training.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace xnetrec
