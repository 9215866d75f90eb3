#pragma once

#include <stdexcept>
#include <string>

namespace thetadet {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Nome outside (0, 0.95] or non-positive truncation settings.
class InvalidContext : public Error {
 public:
  using Error::Error;
};

/// Argument outside the evaluation strip; the caller must reduce it first.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A normalizing scale collapsed to (near) zero, e.g. at a lattice zero.
class DegenerateScale : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A denominator theta factor (or a sampling margin) vanished. `combination()`
/// names the offending argument, e.g. "w_2 - w_1".
class SingularityError : public Error {
 public:
  explicit SingularityError(std::string combination)
      : Error(combination + " singular"), combination_(std::move(combination)) {}

  const std::string& combination() const noexcept { return combination_; }

 private:
  std::string combination_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace thetadet
