#pragma once

#include <stdexcept>
#include <string>

namespace nlod {

/// Invalid user input: bad parameter ranges, malformed configs, infeasible
/// design cardinalities, combinatorial budget violations. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A solver failed to meet its tolerances within the iteration budget.
/// Carries a diagnostic message describing the last iterate. CLI exit code 2.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double last_lambda, double last_residual, int iterations)
      : std::runtime_error(what),
        last_lambda(last_lambda),
        last_residual(last_residual),
        iterations(iterations) {}

  double last_lambda;
  double last_residual;
  int iterations;
};

/// Filesystem failure while reading configs or writing results. CLI exit code 3.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace nlod
