#pragma once

#include <stdexcept>
#include <string>

namespace claytonboost {

// Exception hierarchy. Each category maps to one CLI exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual int ExitCode() const { return 1; }
};

// Invalid argument to a numerical function (non-finite input, out-of-support value).
class DomainError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 4; }
};

// Invalid configuration or usage.
class ConfigError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 2; }
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 3; }
};

// Mismatched dimensions between inputs.
class ShapeError : public DataError {
 public:
  using DataError::DataError;
};

// Model file could not be read or written.
class PersistenceError : public DataError {
 public:
  using DataError::DataError;
};

// A computation produced a non-finite value after all safeguards.
class NumericError : public Error {
 public:
  using Error::Error;
  int ExitCode() const override { return 4; }
};

}  // namespace claytonboost
