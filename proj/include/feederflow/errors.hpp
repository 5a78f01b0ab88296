#pragma once

#include <stdexcept>
#include <string>

namespace feederflow {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed input document: schema violations, dangling references,
/// dimension mismatches. Maps to CLI exit code 3.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// A model invariant does not hold (bad phase sets, tap out of range, ...).
/// Also maps to CLI exit code 3 when triggered during ingestion.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular matrix, diverging iteration, voltage
/// collapse. Maps to CLI exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DivergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace feederflow
