#pragma once

#include <stdexcept>
#include <string>

namespace kirchhoff {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedDimensionError : public Error {
 public:
  using Error::Error;
};

/// Two operands live on different grids or have different component counts.
class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class NonHermitianFormError : public Error {
 public:
  using Error::Error;
};

/// Characteristic roots are not real.
class NotHyperbolicError : public Error {
 public:
  using Error::Error;
};

/// Characteristic roots are real but closer than the gap tolerance.
class NearDegeneracyError : public Error {
 public:
  using Error::Error;
};

class AssumptionViolationError : public Error {
 public:
  using Error::Error;
};

/// Adaptive step size fell below the minimum admissible step.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

class IntegratorFailureError : public Error {
 public:
  using Error::Error;
};

class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

}  // namespace kirchhoff
