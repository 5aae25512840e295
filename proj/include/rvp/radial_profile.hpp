#pragma once

// Radial profiles: potentials phi(r) <= 0 given in closed form, the Plummer
// (Sobolev optimizer) family and the cusp profiles psi_delta, together with
// their L^k norms and Dirichlet integrals.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/quadrature.hpp"

namespace rvp {

/// A scalar function of radius. The derivative is optional; when absent a
/// centred difference is used.
class RadialProfile {
 public:
  using Function = std::function<double(double)>;

  RadialProfile() = default;
  RadialProfile(std::string label, Function value, Function derivative = {},
                bool singular_at_origin = false)
      : label_(std::move(label)),
        value_(std::move(value)),
        derivative_(std::move(derivative)),
        singular_(singular_at_origin) {}

  double operator()(double r) const { return value_(r); }

  double derivative(double r) const {
    if (derivative_) return derivative_(r);
    const double h = 1e-5 * std::max(r, 1e-8);
    return (value_(r + h) - value_(r - h)) / (2.0 * h);
  }

  /// -phi(0+); infinite for profiles singular at the origin.
  double central_depth() const {
    if (singular_) return std::numeric_limits<double>::infinity();
    return -value_(0.0);
  }

  const std::string& label() const noexcept { return label_; }
  bool singular_at_origin() const noexcept { return singular_; }
  bool valid() const noexcept { return static_cast<bool>(value_); }

 private:
  std::string label_;
  Function value_;
  Function derivative_;
  bool singular_ = false;
};

/// phi_kappa(r) = -kappa / sqrt(1 + kappa^2 r^2).
struct PlummerProfile {
  double kappa = 1.0;

  double operator()(double r) const { return -kappa / std::sqrt(1.0 + kappa * kappa * r * r); }
  double derivative(double r) const {
    const double x2 = kappa * kappa * r * r;
    return kappa * kappa * kappa * r / std::pow(1.0 + x2, 1.5);
  }

  operator RadialProfile() const {  // NOLINT(google-explicit-constructor)
    const double k = kappa;
    return RadialProfile(
        "plummer(kappa=" + std::to_string(k) + ")",
        [k](double r) { return PlummerProfile{k}(r); },
        [k](double r) { return PlummerProfile{k}.derivative(r); });
  }
};

/// psi_delta(r) = -c exp(-r) / r^delta, delta in (0, 1).
struct CuspProfile {
  double delta = 0.5;
  double multiplier = 1.0;

  double operator()(double r) const { return -multiplier * std::exp(-r) / std::pow(r, delta); }
  double derivative(double r) const {
    return multiplier * std::exp(-r) * std::pow(r, -delta) * (1.0 + delta / r);
  }

  operator RadialProfile() const {  // NOLINT(google-explicit-constructor)
    const CuspProfile self = *this;
    return RadialProfile(
        "cusp(delta=" + std::to_string(delta) + ")", [self](double r) { return self(r); },
        [self](double r) { return self.derivative(r); }, true);
  }
};

inline PlummerProfile plummer(double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("plummer: kappa must be positive");
  return PlummerProfile{kappa};
}

inline CuspProfile cusp(double delta, double multiplier = 1.0) {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("cusp: delta must lie in (0, 1)");
  if (!(multiplier > 0.0 && multiplier <= 1.0))
    throw InvalidArgument("cusp: multiplier must lie in (0, 1]");
  return CuspProfile{delta, multiplier};
}

/// Refinement ladder adapted to a profile.
inline quad::RadialRule profile_rule(const RadialProfile& phi) {
  quad::RadialRule rule;
  if (!phi.singular_at_origin()) rule.inner = 1e-6;
  return rule;
}

/// \int 4 pi r^2 (phi_-)^k dr, i.e. ||phi_-||_k^k. Throws DivergenceError.
inline double profile_power_integral(const RadialProfile& phi, double k) {
  auto integrand = [&](double r) {
    const double neg = std::max(-phi(r), 0.0);
    return 4.0 * quad::kPi * r * r * std::pow(neg, k);
  };
  const auto result = quad::radial_integral(integrand, profile_rule(phi));
  if (result.divergent) throw DivergenceError("||phi||_" + std::to_string(k) + " of " + phi.label(), k);
  return result.value;
}

/// ||phi_-||_k.
inline double profile_norm(const RadialProfile& phi, double k) {
  return std::pow(profile_power_integral(phi, k), 1.0 / k);
}

/// ||grad phi||_2^2 = \int 4 pi r^2 phi'(r)^2 dr.
inline double dirichlet_energy(const RadialProfile& phi) {
  auto integrand = [&](double r) {
    const double d = phi.derivative(r);
    return 4.0 * quad::kPi * r * r * d * d;
  };
  const auto result = quad::radial_integral(integrand, profile_rule(phi));
  if (result.divergent) throw DivergenceError("Dirichlet integral of " + phi.label(), 2.0);
  return result.value;
}

/// Throws if phi is positive on any probe radius; the trial machinery needs phi <= 0.
inline void require_nonpositive(const RadialProfile& phi) {
  for (int i = -40; i <= 40; ++i) {
    const double r = std::pow(10.0, 0.2 * i);
    if (phi(r) > 0.0) throw InvalidArgument("potential " + phi.label() + " is positive at r = " +
                                            std::to_string(r));
  }
}

}  // namespace rvp
