#pragma once

#include <stdexcept>
#include <string>

namespace twistbeam {

/// Raised when an adaptive rule stops before reaching its tolerances.
/// Carries the residual error estimate at the point of failure.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Raised when a cooperative cancellation token is observed mid-computation.
class OperationCancelled : public std::runtime_error {
 public:
  OperationCancelled() : std::runtime_error("operation cancelled") {}
};

}  // namespace twistbeam
