#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qbagents {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

class DomainError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain_error"; }
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_mismatch"; }
};

/// A reference probability vector (or parameter point) lies outside the
/// physically valid region of the postulate that is asked to use it.
class RegionViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "region_violation"; }
};

/// Applying a postulate to a conditional matrix produced a negative
/// probability, so the matrix is not a valid action for that postulate.
class InvalidConditionalMatrix : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invalid_conditional_matrix"; }
};

/// An outcome arrived that the agent's current beliefs assign probability
/// zero, so Bayes' rule has nothing to normalize.
class ImpossibleOutcome : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "impossible_outcome"; }
};

class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> violations);
  const char* kind() const noexcept override { return "config_error"; }
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

}  // namespace qbagents
