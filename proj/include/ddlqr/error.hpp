#pragma once

#include <stdexcept>
#include <string>

namespace ddlqr {

// Base of every error the library raises. Callers that only care about
// "something numerical went wrong" can catch this; the CLI maps the concrete
// subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Closed-loop matrix has spectral radius >= 1 (infinite H2 cost).
class NotSchur : public Error {
 public:
  using Error::Error;
};

class NotStabilizable : public Error {
 public:
  using Error::Error;
};

// rank W0 < n + m.
class NotIdentifiable : public Error {
 public:
  using Error::Error;
};

class Infeasible : public Error {
 public:
  using Error::Error;
};

// X0*Y too ill-conditioned to recover K = U0 Y (X0 Y)^-1.
class DegenerateRecovery : public Error {
 public:
  using Error::Error;
};

// Operation needs the disturbance record D0, which the dataset does not carry.
class OracleRequired : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace ddlqr
