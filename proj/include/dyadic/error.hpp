#pragma once

#include <stdexcept>
#include <string>

namespace dyadic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input data, e.g. a non-finite shell amplitude.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or out-of-range parameters.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Index or time outside the valid range of a container.
class RangeError : public Error {
 public:
  using Error::Error;
};

class DiagnosticsError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ConfigurationError {
 public:
  ParseError(int line, std::string key, const std::string& what)
      : ConfigurationError("line " + std::to_string(line) + ", key '" + key + "': " + what),
        line_(line),
        key_(std::move(key)) {}

  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Step size fell below dt_min. shell() names the component that limited the step.
class StiffnessError : public NumericalError {
 public:
  StiffnessError(double t, double dt, int shell)
      : NumericalError("step size " + std::to_string(dt) + " below dt_min at t = " + std::to_string(t) +
                       " (limiting shell " + std::to_string(shell) + ")"),
        t_(t),
        dt_(dt),
        shell_(shell) {}

  double time() const { return t_; }
  double step() const { return dt_; }
  int shell() const { return shell_; }

 private:
  double t_;
  double dt_;
  int shell_;
};

class QuadratureError : public NumericalError {
 public:
  QuadratureError(double estimate, double error_estimate)
      : NumericalError("adaptive quadrature did not converge (estimate " + std::to_string(estimate) +
                       ", error " + std::to_string(error_estimate) + ")"),
        estimate_(estimate),
        error_(error_estimate) {}

  double estimate() const { return estimate_; }
  double error_estimate() const { return error_; }

 private:
  double estimate_;
  double error_;
};

}  // namespace dyadic
