#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace enkf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument value (negative radius, inflation below one, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A factorization or solve failed (e.g. innovation matrix not SPD).
class LinearSolveError : public Error {
 public:
  using Error::Error;
};

/// Non-finite state encountered while integrating an analysis flow.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int step) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

/// Fixed-point iteration of an implicit integrator did not converge.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, Eigen::VectorXd iterate)
      : Error(what), iterate_(std::move(iterate)) {}
  const Eigen::VectorXd& iterate() const noexcept { return iterate_; }

 private:
  Eigen::VectorXd iterate_;
};

}  // namespace enkf
