#pragma once

#include <stdexcept>
#include <string>

namespace reductcheck {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: a precondition, domain membership or packet containment failed.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Inconsistent configuration of a check or scenario.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Bridge maps whose model ids do not chain.
class CompositionError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// A domain sampler produced no admissible state.
class EmptyDomainError : public ConfigError {
public:
  using ConfigError::ConfigError;
};

/// Non-finite values, norm/trace drift beyond tolerance, or a trajectory leaving the grid.
class NumericalError : public Error {
public:
  using Error::Error;
};

} // namespace reductcheck
