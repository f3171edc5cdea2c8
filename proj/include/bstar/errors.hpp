#pragma once

#include <stdexcept>
#include <string>

namespace bstar {

// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or dimensionally inconsistent input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A residual or derivative evaluated to a non-finite value.
class NumericalDomainError : public Error {
 public:
  using Error::Error;
};

// Contact normal undefined because the witness points coincide.
class DegenerateContact : public Error {
 public:
  using Error::Error;
};

// IK could not bring a waypoint within tolerance during initialization.
class InitializationFailed : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw InvalidInput(msg);
}

}  // namespace bstar
