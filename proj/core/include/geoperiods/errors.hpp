#pragma once

#include <stdexcept>
#include <string>

namespace geoperiods {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point or curve lies outside the chart domain of its surface.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method (horizon doubling, shooting, Newton) did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A conformal geodesic left the rectangle on which the metric is defined.
class EscapeError : public DomainError {
 public:
  EscapeError(const std::string& what, double exit_parameter)
      : DomainError(what), exit_parameter_(exit_parameter) {}
  double exit_parameter() const noexcept { return exit_parameter_; }

 private:
  double exit_parameter_;
};

/// Objects from incompatible surface variants were combined.
class TypeMismatchError : public Error {
 public:
  using Error::Error;
};

/// Comparison-only surfaces (the round sphere) handed to a module that
/// requires nonpositive curvature.
class UnsupportedSurfaceError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// A Fourier frequency that is not an integer multiple of 2π/L.
class FrequencyGridError : public Error {
 public:
  using Error::Error;
};

/// Phase evaluated where the two lifted points nearly coincide.
class ProximityError : public Error {
 public:
  using Error::Error;
};

class UnderflowError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file (curve CSV and the like).
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace geoperiods
