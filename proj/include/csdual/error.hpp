#pragma once

#include <stdexcept>
#include <string>

namespace csdual {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed model (degrees, coefficients, field) or out-of-domain argument.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// xi'' vanishes where a quotient by it is required.
class SingularPointError : public Error {
 public:
  using Error::Error;
};

/// Measure violates the contract of the functional it was passed to.
class InvalidMeasureError : public Error {
 public:
  using Error::Error;
};

/// Parameter vector cannot be mapped to a probability measure.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace csdual
