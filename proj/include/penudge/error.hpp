#pragma once

#include <stdexcept>
#include <string>

namespace penudge {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical abort: CFL violation, non-finite values, time mismatch.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Input violates the div_H of depth-average constraint.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Spectral coefficients are not Hermitian.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

}  // namespace penudge
