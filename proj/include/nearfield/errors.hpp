#pragma once

#include <stdexcept>
#include <string>

namespace nearfield {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is syntactically well-formed but violates a modelling assumption.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Base for failures of the numerical pipeline (CLI exit code 3).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// lambda is (numerically) a Dirichlet eigenvalue: a DtN map has a pole.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, int degree) : NumericalError(what), degree_(degree) {}
  int degree() const noexcept { return degree_; }

 private:
  int degree_;
};

class InvertibilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BoundsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Field evaluation too close to the quadrature nodes of a source surface.
class ProximityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace nearfield
