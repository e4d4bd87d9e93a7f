#pragma once

#include <stdexcept>
#include <string>

namespace boxheat {

/// Base class for all library errors. The CLI maps the concrete subclasses
/// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: violated preconditions, malformed configs, mismatched grids.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to converge or produced non-finite values.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A checked inequality (kernel envelope, decay bound) was violated.
class BoundViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace boxheat
