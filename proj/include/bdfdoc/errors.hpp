#pragma once

#include <stdexcept>
#include <string>

namespace bdfdoc {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// BDF order outside the supported range.
class UnsupportedOrderError : public Error {
 public:
  explicit UnsupportedOrderError(int k)
      : Error("unsupported BDF order k=" + std::to_string(k)), order_(k) {}
  int order() const noexcept { return order_; }

 private:
  int order_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Iterative numerics (root finding, eigenvalues, pivoting) failed.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A time step could not be completed; carries the step index.
class StepError : public Error {
 public:
  StepError(int step, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace bdfdoc
