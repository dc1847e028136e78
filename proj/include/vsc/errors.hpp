#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace vsc {

/// Input outside the domain of an operation (non-positive temperature, empty ensemble, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A parameter field violates its invariant. `field()` names the offending key.
class ParameterError : public std::invalid_argument {
 public:
  ParameterError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Numerical failure inside a realization (eigensolver, negative populations).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& message,
                          std::optional<std::uint64_t> realization = std::nullopt)
      : std::runtime_error(realization ? message + " (realization " +
                                             std::to_string(*realization) + ")"
                                       : message),
        realization_(realization) {}

  std::optional<std::uint64_t> realization() const noexcept { return realization_; }

 private:
  std::optional<std::uint64_t> realization_;
};

/// The symmetrized generator is not symmetric: rates break detailed balance.
class DetailedBalanceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed or inconsistent configuration file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vsc
