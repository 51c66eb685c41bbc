#pragma once

#include <stdexcept>
#include <string>

namespace tpsr {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data: undecodable files, shape mismatches,
// values outside their domain. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures (missing, unreadable or unwritable paths).
class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Numerical or internal failure during a computation (e.g. non-finite loss).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace tpsr
