#pragma once

#include <stdexcept>
#include <string>

namespace mvbeta {

// Root of every error raised by the library. The CLI maps DomainError to a
// usage failure and everything else to a runtime failure.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the regime where an operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

class MissingRaw : public DomainError {
 public:
  using DomainError::DomainError;
};

class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class IterationFailure : public Error {
 public:
  using Error::Error;
};

class ComplexSpectrum : public Error {
 public:
  using Error::Error;
};

class NonPositiveRoot : public Error {
 public:
  using Error::Error;
};

class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class RetryExhausted : public Error {
 public:
  using Error::Error;
};

class SingularJacobian : public Error {
 public:
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class DegenerateBinning : public Error {
 public:
  using Error::Error;
};

class InsufficientRefs : public Error {
 public:
  using Error::Error;
};

class LowPower : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace mvbeta
