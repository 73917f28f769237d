#pragma once

#include <stdexcept>
#include <string>

namespace bellgames {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A game, strategy or matrix is malformed (bad shape, not PSD, incomplete).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class SymmetryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Work would exceed a configured size guard; the message carries the estimate.
class RefusedError : public Error {
 public:
  using Error::Error;
};

}  // namespace bellgames
