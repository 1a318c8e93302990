#pragma once

#include <stdexcept>

namespace driftless {

/// Base class for all toolkit errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidMatrix : Error {
  using Error::Error;
};

struct InvalidSchedule : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

struct LipschitzUnknown : Error {
  using Error::Error;
};

struct InvalidProblem : Error {
  using Error::Error;
};

struct NoRoot : Error {
  using Error::Error;
};

struct InvalidInterval : Error {
  using Error::Error;
};

struct SingularInertia : Error {
  using Error::Error;
};

struct BaselineSynthesisFailed : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace driftless
