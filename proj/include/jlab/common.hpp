#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace jlab {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain where an operation is defined
/// (t <= 0, derivative order too high, point outside a table, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: quadrature did not converge within its
/// budget, a linear system was singular, an exponent overflowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Configuration or scenario input is malformed or violates an invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  [[nodiscard]] double width() const { return hi - lo; }
  [[nodiscard]] double mid() const { return 0.5 * (lo + hi); }
  [[nodiscard]] bool contains(double v) const { return v >= lo && v <= hi; }
};

}  // namespace jlab
