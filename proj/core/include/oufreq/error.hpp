#pragma once

#include <stdexcept>
#include <string>

namespace oufreq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent user configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The angular operator violates mu_1 > -(N-2)^2/4, so the quadratic form
/// of -Delta - a/|x|^2 is not positive definite.
class PositivityError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to reach its stated accuracy.
class AccuracyError : public Error {
 public:
  using Error::Error;
};

/// Iterative kernel did not converge (series, eigensolver).
class NumericError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

/// A spectral truncation is too small to certify the requested result.
class TruncationError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

/// A quantity that must be classified exactly fell into an ambiguity band.
class DegeneracyError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

/// An integrand or evaluation hit a singular point.
class SingularityError : public AccuracyError {
 public:
  using AccuracyError::AccuracyError;
};

/// A mathematical invariant was violated beyond its slack.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace oufreq
