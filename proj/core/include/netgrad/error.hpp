#pragma once

#include <stdexcept>
#include <string>

namespace netgrad {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Diffusion coefficient has a non-positive eigenvalue at some node.
class NonSPDCoefficient : public Error {
 public:
  using Error::Error;
};

/// Linear solver did not reach the requested residual.
class SolverDiverged : public Error {
 public:
  using Error::Error;
};

/// A density that must stay positive reached zero or below.
class PositivityLost : public Error {
 public:
  PositivityLost(const std::string& what, double suggested_dt = 0.0)
      : Error(what), suggested_dt_(suggested_dt) {}

  /// Smaller time step to retry with, or 0 when not applicable.
  double suggested_dt() const noexcept { return suggested_dt_; }

 private:
  double suggested_dt_;
};

class GummelDiverged : public Error {
 public:
  using Error::Error;
};

class CertificateFailed : public Error {
 public:
  using Error::Error;
};

class InadmissiblePerturbation : public Error {
 public:
  using Error::Error;
};

/// A time step produced NaN or Inf.
class StepRejected : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace netgrad
