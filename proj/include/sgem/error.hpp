#pragma once

#include <stdexcept>
#include <string>

namespace sgem {

/// Base of every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (missing cells, bad files, negative stocks).
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Lookup of an unknown identifier (region, sector, group).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// The benchmark cannot be turned into a consistent parameter set.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// A behavioural function was evaluated outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Newton failure, singular Jacobian, non-finite evaluations.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace sgem
