#pragma once

#include <stdexcept>
#include <string>

namespace cqs {

// Numerical-validity failures map to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Effective Hamiltonian requested outside its regime.
class ValidityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A kicked diagonal argument (K/2j)(2m+1) sits on the set 2*pi*l, l != 0.
class SingularArgument : public ValidityError {
 public:
  using ValidityError::ValidityError;
};

class LandscapeSingularity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoSaddle : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyContour : public std::runtime_error {
 public:
  EmptyContour(const std::string& what, double energy)
      : std::runtime_error(what), energy_(energy) {}
  double energy() const noexcept { return energy_; }

 private:
  double energy_;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cqs
