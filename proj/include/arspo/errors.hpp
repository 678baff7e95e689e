#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace arspo {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An input lies outside the domain of a mapping or metric.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The quantity is undefined at this point (zero variance, step discontinuity).
class SingularityError : public Error {
 public:
  using Error::Error;
};

/// A ratio sits exactly on a clip boundary where the derivative is not defined.
class BoundaryError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : Error(field_path + ": " + message), field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

/// Raised by the training loop when a parameter or gradient stops being finite.
class NumericalError : public Error {
 public:
  NumericalError(std::int64_t step, const std::string& message)
      : Error("step " + std::to_string(step) + ": " + message), step_(step) {}

  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

}  // namespace arspo
