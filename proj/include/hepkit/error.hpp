#pragma once

#include <stdexcept>
#include <string>

namespace hepkit {

/// Base of every domain error raised by the library. The CLI maps these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KinematicsError : public Error {
 public:
  enum class Kind { BelowThreshold, NonPhysical };

  KinematicsError(Kind kind, const std::string& detail)
      : Error(detail), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised when a function expression cannot be evaluated at a point.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

class StoreError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class IntegrationError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace hepkit
