#pragma once

#include <stdexcept>
#include <string>

namespace samp {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad dimensions, out-of-range parameters, malformed configuration.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Argument outside the admissible domain of a spectral transform (pole,
// non-positive S value).  Solvers treat this as a divergence signal.
class DomainError : public Error {
 public:
  using Error::Error;
};

class RootNotFound : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

// Matrix expected to be (symmetric) positive definite / invertible was not.
class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Every Monte-Carlo trial of an experiment diverged.
class AllTrialsDiverged : public Error {
 public:
  using Error::Error;
};

}  // namespace samp
