#pragma once

#include <stdexcept>
#include <string>

namespace lipest {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad argument shapes or values supplied by the caller.
struct DimensionMismatch : Error {
  using Error::Error;
};
struct NonFiniteInput : Error {
  using Error::Error;
};
struct NonFiniteMatrix : Error {
  using Error::Error;
};
struct NonFiniteValue : Error {
  using Error::Error;
};

// Model construction / file validation failures.
struct InvalidModel : Error {
  using Error::Error;
};

// Domain-level failures (CLI exit code 3).
struct UnsupportedNormPair : Error {
  using Error::Error;
};
struct PartitionTooLarge : Error {
  using Error::Error;
};
struct GridTooLarge : Error {
  using Error::Error;
};
struct DivergedLoss : Error {
  using Error::Error;
};

// Configuration invariant violations (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// File access / parse failures (CLI exit code 4). Always carries the path.
struct IoError : Error {
  std::string path;
  IoError(const std::string& file, const std::string& detail)
      : Error(file + ": " + detail), path(file) {}
};

}  // namespace lipest
