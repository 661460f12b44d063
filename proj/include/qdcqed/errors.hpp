#pragma once

#include <stdexcept>
#include <string>

namespace qdcqed {

/// A parameter bundle or geometry violates one of its invariants.
class ParamError : public std::invalid_argument {
 public:
  ParamError(std::string field, const std::string& what)
      : std::invalid_argument(what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed input file or configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of an operation (e.g. delta = 0 for an optimum).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Time integration could not proceed or drifted out of tolerance.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Stationary state is not unique (or the bordered system is singular).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Decay-rate fit precondition failure.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qdcqed
