#pragma once

#include <stdexcept>
#include <string>

namespace hcent {

/// Argument outside the mathematical domain of an operation
/// (coupling >= 1, overlapping blocks, bad site index, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A requested problem size exceeds a configured limit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cholesky factorization of a correlation block failed.
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The dense eigensolver did not converge.
class EigenSolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spectrum is unphysical, or was passed to a measure expecting the other source.
class InvalidSpectrum : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Configuration problem; `field()` is a dotted path into the config document.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace hcent
