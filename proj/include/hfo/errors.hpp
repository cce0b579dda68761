#pragma once

#include <stdexcept>
#include <string>

namespace hfo {

/// Base of every error thrown by the library. The CLI maps all of them to
/// exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite or out-of-range physical parameter, or bad function argument.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// A standing assumption of the model does not hold (negative real spectrum,
/// ell >= 1, ...).
class AssumptionViolation : public Error {
 public:
  using Error::Error;
};

class SynthesisFailure : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class StepsizeInvalid : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Observed jump rate exceeded the analytic bound by the guard factor.
class ZenoGuard : public Error {
 public:
  using Error::Error;
};

class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class RegressionError : public Error {
 public:
  using Error::Error;
};

}  // namespace hfo
