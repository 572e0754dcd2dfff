#pragma once

#include <stdexcept>
#include <string>

namespace raqr {

// Bad user input: config files, flags, parameter records.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical procedure could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSystemError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Bussgang gain kappa(r) vanished; the input-referred noise is unbounded.
class GainNullError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace raqr
