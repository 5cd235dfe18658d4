#pragma once

#include <stdexcept>
#include <string>

namespace ebill {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Iteration, quadrature or integration that failed to reach its tolerance.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A truncated expansion is not converged (Fourier series, circular basis).
class TruncationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public IoError {
 public:
  using IoError::IoError;
};

class VersionError : public IoError {
 public:
  using IoError::IoError;
};

class TruncatedFileError : public IoError {
 public:
  using IoError::IoError;
};

/// A cached table is smaller than the basis requested from it.
class InsufficientBasisError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace ebill
