#pragma once

#include <stdexcept>
#include <string>

namespace socialopt {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration, invalid input data or a violated step-size certificate.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Non-finite iterate or an iterative solver that ran out of iterations.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long iteration)
      : Error(what), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// A closed-form oracle and a solver disagreed beyond tolerance.
class OracleMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace socialopt
