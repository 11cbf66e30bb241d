#pragma once

#include <stdexcept>
#include <string>

namespace pflow {

/// Base class for all solver errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// A step was attempted with a time step above the stability limit.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double required_dt)
      : Error(what), required_dt_(required_dt) {}
  double required_dt() const { return required_dt_; }

 private:
  double required_dt_;
};

/// A hard invariant (positivity, divergence, finiteness) was broken.
class InvariantBreach : public Error {
 public:
  using Error::Error;
};

/// Linear solver failed to reach its tolerance.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace pflow
