#pragma once

#include <stdexcept>
#include <string>

namespace flapsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document (bad JSON, wrong type, unknown field).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates a model invariant. `field()` names it.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Euler-angle pitch reached the gimbal-lock guard band.
class KinematicsError : public Error {
 public:
  using Error::Error;
};

class UnknownAttachmentError : public Error {
 public:
  using Error::Error;
};

/// The spanwise collocation matrix is singular or ill conditioned.
class CollocationError : public Error {
 public:
  CollocationError(const std::string& what, double condition)
      : Error(what + " (condition estimate " + std::to_string(condition) + ")"),
        condition_(condition) {}
  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

/// The freestream speed fell below the floor of the unsteady model.
class FreestreamError : public Error {
 public:
  using Error::Error;
};

/// Mass matrix not SPD or constraint Gram matrix singular.
class ConstraintError : public Error {
 public:
  using Error::Error;
};

/// Non-finite simulation state.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, std::string component)
      : Error("simulation diverged at t=" + std::to_string(time) +
              " s: non-finite " + component),
        time_(time),
        component_(std::move(component)) {}
  double time() const noexcept { return time_; }
  const std::string& component() const noexcept { return component_; }

 private:
  double time_;
  std::string component_;
};

class MixingError : public Error {
 public:
  using Error::Error;
};

}  // namespace flapsim
