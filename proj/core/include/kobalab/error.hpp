#pragma once

#include <stdexcept>
#include <string>

namespace kobalab {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (dimension, range, membership).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not implemented for this domain or disc variant.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// A sampled or analytic construction check failed.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// Parameters are outside the range where a bound's constants are valid.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Floating-point evaluation produced a non-finite value.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace kobalab
