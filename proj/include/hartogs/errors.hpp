#pragma once

#include <stdexcept>
#include <string>

namespace hartogs {

/// Caller passed arguments that violate an operation's contract (wrong
/// dimension, out-of-range parameter). Maps to CLI exit code 2.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Point lies outside the set where an operation is defined (e.g. z' = 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Gradient requested on the measure-zero locus where a norm is not
/// differentiable. Monte Carlo callers resample.
class NotDifferentiable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sampler or estimator left its workable regime (acceptance collapse,
/// resample budget exhausted).
class DiagnosticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration detected before or during setup.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hartogs
