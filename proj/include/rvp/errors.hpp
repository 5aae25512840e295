#pragma once

#include <stdexcept>
#include <string>

namespace rvp {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Raised when an operation is asked of a representation that cannot carry it,
/// e.g. an L^alpha norm (alpha > 1) of an atomic ensemble.
class UnsupportedRepresentation : public Error {
 public:
  using Error::Error;
};

/// An integral that keeps growing under refinement of its domain.
class DivergenceError : public Error {
 public:
  DivergenceError(std::string quantity, double exponent)
      : Error("divergent integral: " + quantity +
              (exponent == exponent ? " (exponent " + std::to_string(exponent) + ")" : "")),
        quantity_(std::move(quantity)),
        exponent_(exponent) {}

  const std::string& quantity() const noexcept { return quantity_; }
  double exponent() const noexcept { return exponent_; }

 private:
  std::string quantity_;
  double exponent_;
};

/// Mass of an ensemble lies outside the radial grid.
class SupportError : public Error {
 public:
  explicit SupportError(double escaping_fraction)
      : Error("radial grid does not cover the support: escaping mass fraction " +
              std::to_string(escaping_fraction)),
        escaping_fraction_(escaping_fraction) {}

  double escaping_fraction() const noexcept { return escaping_fraction_; }

 private:
  double escaping_fraction_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace rvp
