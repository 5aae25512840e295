#pragma once

// Constants and exponents of the a-priori estimates used to audit runs: the
// energy bounds for subcritical data, the L^gamma bound on rho, the pointwise
// force bound and the momentum-support bootstrap.

#include <cmath>
#include <optional>

#include "rvp/criticality.hpp"
#include "rvp/errors.hpp"
#include "rvp/quadrature.hpp"

namespace rvp {

struct DensityExponents {
  double gamma = 0.0;  // (4 alpha - 3) / (3 alpha - 2)
  double eta = 0.0;    // alpha / (4 alpha - 3)
};

inline DensityExponents density_exponents(double alpha) {
  if (!(alpha >= 1.0)) throw InvalidArgument("density bound needs alpha >= 1");
  if (std::isinf(alpha)) return {4.0 / 3.0, 0.25};
  return {(4.0 * alpha - 3.0) / (3.0 * alpha - 2.0), alpha / (4.0 * alpha - 3.0)};
}

/// C(alpha) in ||rho||_gamma <= C(alpha) ||f||_alpha^eta E_p^(1-eta), from
/// optimising rho <= (4 pi/3)^(1/alpha') F P^(3/alpha') + G / P over P.
inline double density_bound_constant(double alpha) {
  if (alpha == 1.0) return 1.0;
  const double e = std::isinf(alpha) ? 3.0 : 3.0 * (1.0 - 1.0 / alpha);
  const double eta = 1.0 / (1.0 + e);
  const double inv_conj = std::isinf(alpha) ? 1.0 : 1.0 - 1.0 / alpha;
  return (1.0 + 1.0 / e) * std::pow(e, eta) * std::pow(4.0 * quad::kPi / 3.0, eta * inv_conj);
}

struct ForceExponents {
  double theta = 0.0;  // (1 - gamma/3) / (1 - gamma/alpha)
  double xi = 0.0;     // 3 (1 - 1/alpha) theta
};

inline ForceExponents force_exponents(double alpha, double gamma) {
  if (!(gamma < 3.0 && alpha > 3.0)) throw InvalidArgument("force bound needs gamma < 3 < alpha");
  ForceExponents f;
  f.theta = (1.0 - gamma / 3.0) / (1.0 - gamma / alpha);
  f.xi = 3.0 * (1.0 - 1.0 / alpha) * f.theta;
  return f;
}

/// C_{alpha,gamma} in |grad phi| <= C ||f||_alpha^theta ||rho||_gamma^(1-theta) P^xi,
/// from splitting the Newton kernel at radius R and optimising in R.
inline double force_bound_constant(double alpha, double gamma) {
  const auto ex = force_exponents(alpha, gamma);
  const double pi = quad::kPi;
  const double ac = alpha / (alpha - 1.0);  // alpha'
  const double gc = gamma / (gamma - 1.0);  // gamma'
  const double c1 = std::pow(4.0 * pi / (3.0 - 2.0 * ac), 1.0 / ac) * std::pow(4.0 * pi / 3.0, 1.0 / ac);
  const double c2 = std::pow(4.0 * pi / (2.0 * gc - 3.0), 1.0 / gc);
  const double a = 1.0 - 3.0 / alpha;
  const double b = 3.0 / gamma - 1.0;
  const double split = std::pow(b / a, a / (a + b)) + std::pow(a / b, b / (a + b));
  return std::pow(c1, ex.theta) * std::pow(c2, 1.0 - ex.theta) * split;
}

/// Norms of the initial datum that the bounds depend on.
struct SourceNorms {
  double norm_3_2 = 0.0;    // ||f_0||_{3/2}
  double alpha = 6.0;
  double norm_alpha = 0.0;  // ||f_0||_alpha
  double energy = 0.0;      // E(f_0)
  double support = 0.0;     // P(0)

  double varkappa() const {
    const auto c = classify_norm(norm_3_2);
    if (!c.varkappa) throw InvalidArgument("a-priori bounds need subcritical data");
    return *c.varkappa;
  }
  double gamma() const { return density_exponents(alpha).gamma; }

  /// Right-hand side of the L^gamma bound on rho_t.
  double density_bound() const {
    const auto ex = density_exponents(alpha);
    return density_bound_constant(alpha) * std::pow(norm_alpha, ex.eta) *
           std::pow((1.0 + varkappa()) * energy, 1.0 - ex.eta);
  }
};

/// Norms of an analytic datum for the bound audit.
inline SourceNorms source_norms(const PhaseDensity& f0, double alpha = 6.0, const PhaseOptions& opts = {}) {
  SourceNorms n;
  n.alpha = alpha;
  n.norm_3_2 = lp_norm(f0, 1.5, opts);
  n.norm_alpha = lp_norm(f0, alpha, opts);
  n.energy = energy(f0).total;
  n.support = momentum_support(f0);
  return n;
}

/// Largest root of x = A + C^(1/2) x^(xi/2), A = P0 + sqrt(1 + P0^2).
inline double solve_support_bootstrap(double p0, double c, double xi) {
  if (!(xi < 2.0)) throw InvalidArgument("support bootstrap needs xi < 2");
  if (!(c >= 0.0)) throw InvalidArgument("support bootstrap needs C >= 0");
  const double a = p0 + std::sqrt(1.0 + p0 * p0);
  auto g = [&](double x) { return a + std::sqrt(c) * std::pow(x, 0.5 * xi) - x; };
  if (c == 0.0) return a;
  double lo = a, hi = 2.0 * a;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("support bootstrap bracket overflow");
  }
  for (int it = 0; it < 300 && hi - lo > 1e-15 * hi; ++it) {
    const double m = 0.5 * (lo + hi);
    (g(m) > 0.0 ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

/// Momentum-support bound for subcritical data with alpha > 3.
inline double predict_support_bound(const SourceNorms& n) {
  if (!(n.alpha > 3.0)) throw InvalidArgument("support bound needs alpha > 3 (xi < 2)");
  const double gamma = n.gamma();
  const auto ex = force_exponents(n.alpha, gamma);
  const double c = force_bound_constant(n.alpha, gamma) * std::pow(n.norm_alpha, ex.theta) *
                   std::pow(n.density_bound(), 1.0 - ex.theta);
  return solve_support_bootstrap(n.support, c, ex.xi);
}

}  // namespace rvp
