#pragma once

#include <stdexcept>
#include <string>

namespace passnet {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed models, graphs, documents. Maps to CLI exit code 3.
class InputError : public Error {
 public:
  using Error::Error;
};

// A computation that could not produce a trustworthy number. Maps to exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InputError {
 public:
  using InputError::InputError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFinite : public NumericalError {
 public:
  NonFinite(const std::string& what, double time) : NumericalError(what), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace passnet
