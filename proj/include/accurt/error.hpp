#pragma once

#include <stdexcept>
#include <string>

namespace accurt {

/// Base class of everything this library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be inverted is (numerically) singular.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

}  // namespace accurt
