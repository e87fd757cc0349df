#pragma once

#include <stdexcept>
#include <string>

namespace realcross {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input configuration (bad JSON field, invalid shape parameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the domain of a tabulated pulse.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Δ = Ω = 0: the dressed basis is undefined.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Operation requested over an interval that contains a declared crossing.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an analysis routine does not hold (e.g. Δ not odd).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The adaptive propagator could not meet its tolerance above the minimum step.
class StiffnessError : public Error {
 public:
  using Error::Error;
};

/// Leading-order behavior of a pulse at a crossing could not be determined.
class ClassificationError : public Error {
 public:
  using Error::Error;
};

}  // namespace realcross
