#pragma once

#include <stdexcept>
#include <string>

namespace czx {

// Base of every library error; the subclasses map onto the failure kinds that
// callers are expected to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ResourceError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Throws E with the message when cond is false.
template <class E = ParameterError>
inline void require(bool cond, const std::string& message) {
  if (!cond) throw E(message);
}

const char* version();

}  // namespace czx
