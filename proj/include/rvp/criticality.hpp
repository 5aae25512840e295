#pragma once

// Critical constants C_beta: the sharp value at beta = 3/2, the closed-form
// bracket for beta > 3/2, a Lane-Emden polytrope estimate, and the
// classification of data relative to C_{3/2}.

#include <cmath>
#include <optional>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "rvp/errors.hpp"
#include "rvp/functionals.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/quadrature.hpp"

namespace rvp {

/// (3/8)(15/16)^(1/3).
inline const double kCriticalNorm = 0.375 * std::cbrt(15.0 / 16.0);

struct CbetaBounds {
  double lower = 0.0;
  double upper = 0.0;
  /// Set for beta < 3/2, where C_beta = 0.
  bool vanishing = false;
};

inline CbetaBounds cbeta_bounds(double beta) {
  if (!(beta > 1.0)) throw InvalidArgument("cbeta_bounds needs beta > 1");
  if (beta < 1.5) return {0.0, 0.0, true};
  const double pi = quad::kPi;
  CbetaBounds b;
  b.lower = std::pow(std::pow(0.375, 3) * (15.0 / 16.0), 1.0 - 1.0 / beta);
  const double prod = (1.0 + 2.0 * beta) * (2.0 + 2.0 * beta) * (3.0 + 2.0 * beta);
  const double inner = 8.0 * std::pow(pi, 2.5) / prod * std::tgamma(beta) / std::tgamma(beta + 1.5);
  b.upper = 45.0 / (8.0 * pi * pi) * std::pow(inner, 1.0 / beta);
  return b;
}

enum class Criticality { Subcritical, Critical, Supercritical };

inline const char* to_string(Criticality c) {
  switch (c) {
    case Criticality::Subcritical: return "subcritical";
    case Criticality::Critical: return "critical";
    case Criticality::Supercritical: return "supercritical";
  }
  return "?";
}

struct Classification {
  double norm = 0.0;  // ||f||_{3/2}
  Criticality kind = Criticality::Subcritical;
  /// C_{3/2} / (C_{3/2} - ||f||_{3/2}) for subcritical data.
  std::optional<double> varkappa;
};

/// Norms within rel_tol of C_{3/2} count as critical; quadrature cannot
/// resolve the difference.
inline Classification classify_norm(double norm, double rel_tol = 1e-12) {
  Classification c;
  c.norm = norm;
  if (std::abs(norm - kCriticalNorm) <= rel_tol * kCriticalNorm) {
    c.kind = Criticality::Critical;
  } else if (norm < kCriticalNorm) {
    c.kind = Criticality::Subcritical;
    c.varkappa = kCriticalNorm / (kCriticalNorm - norm);
  } else {
    c.kind = Criticality::Supercritical;
  }
  return c;
}

inline Classification classify(const PhaseDensity& f, const PhaseOptions& opts = {}) {
  return classify_norm(lp_norm(f, 1.5, opts));
}

struct CriticalityReport {
  double beta = 1.5;
  CbetaBounds bounds;
  std::optional<double> estimate;
  std::optional<Classification> datum;
};

// ---- scaling along hyperbolas kappa lambda = const -------------------------

/// K(f_{kappa,lambda}) = lambda^-1 E_p^u(f) + kappa E_q(f).
inline double scaled_kato(double ultra, double potential, double kappa, double lambda) {
  return ultra / lambda + kappa * potential;
}

struct HyperbolaPoint {
  double kappa = 1.0;
  double lambda = 1.0;
  double value = 0.0;  // K(f_{kappa,lambda})
};

/// Product kappa lambda at which K(f_{kappa,lambda}) vanishes: E_p^u / (-E_q).
inline double zero_crossing_product(double ultra, double potential) {
  if (!(potential < 0.0)) throw InvalidArgument("hyperbola descent needs E_q < 0");
  return ultra / -potential;
}

/// Scaling on the hyperbola kappa lambda = product reaching K = target.
/// target = 0 returns the borderline product with kappa = 1.
inline HyperbolaPoint hyperbola_descent(double ultra, double potential, double target,
                                        std::optional<double> product = std::nullopt) {
  const double borderline = zero_crossing_product(ultra, potential);
  if (target == 0.0 && !product) return {1.0, borderline, 0.0};
  if (target > 0.0) throw InvalidArgument("hyperbola descent targets K <= 0");
  const double P = product.value_or(2.0 * borderline);
  if (!(P > borderline)) throw InvalidArgument("product kappa lambda must exceed E_p^u / (-E_q) for K < 0");
  const double slope = ultra / P + potential;  // K = kappa * slope
  HyperbolaPoint h;
  h.kappa = target / slope;
  h.lambda = P / h.kappa;
  h.value = scaled_kato(ultra, potential, h.kappa, h.lambda);
  return h;
}

inline HyperbolaPoint hyperbola_descent(const PhaseDensity& f, double target,
                                        std::optional<double> product = std::nullopt) {
  const auto e = energy(f);
  return hyperbola_descent(e.ultra, e.potential, target, product);
}

// ---- polytrope estimate ----------------------------------------------------

struct PolytropeSolution {
  double first_zero = 0.0;  // xi_1
  double mass = 0.0;
  double ultra = 0.0;   // E_p^u of the mass-normalised density
  double potential = 0.0;  // E_q of the mass-normalised density
  double norm = 0.0;    // ||f||_beta of the mass-normalised density
  double objective = 0.0;
};

namespace detail {

inline double beta_fn(double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); }

}  // namespace detail

/// Objective (E_p^u / -E_q)^(3(1-1/beta)) ||f||_beta for f = c (E_0 - |p| - phi)_+^k
/// with phi solved self-consistently. In units where psi = E_0 - phi is 1 at
/// the centre and 4 pi c \int_{|p|<1} (1-|p|)^k dp = 1, psi obeys the
/// Lane-Emden equation theta'' + 2 theta'/xi = -theta^(k+3).
inline PolytropeSolution polytrope_objective(double beta, double k) {
  namespace ode = boost::numeric::odeint;
  if (!(beta > 1.0) || !(k > 0.0)) throw InvalidArgument("polytrope needs beta > 1 and k > 0");
  const double n = k + 3.0;
  if (!(n < 5.0)) throw NumericalError("polytrope index k + 3 >= 5 has no compact support");
  const double pi = quad::kPi;
  const double c3 = 4.0 * pi * detail::beta_fn(3.0, k + 1.0);
  const double c4 = 4.0 * pi * detail::beta_fn(4.0, k + 1.0);
  const double cb = 4.0 * pi * detail::beta_fn(3.0, k * beta + 1.0);
  const double c = 1.0 / (4.0 * pi * c3);

  using State = std::array<double, 6>;  // theta, theta', I_n, I_{k+4}, I_beta, I_D
  auto rhs = [&](const State& y, State& dy, double xi) {
    const double th = std::max(y[0], 0.0);
    const double x2 = xi * xi;
    dy[0] = y[1];
    dy[1] = -std::pow(th, n) - 2.0 * y[1] / xi;
    dy[2] = x2 * std::pow(th, n);
    dy[3] = x2 * std::pow(th, k + 4.0);
    dy[4] = x2 * std::pow(th, k * beta + 3.0);
    dy[5] = x2 * y[1] * y[1];
  };
  const double xi0 = 1e-6;
  const double x3 = xi0 * xi0 * xi0 / 3.0;
  State y{1.0 - xi0 * xi0 / 6.0, -xi0 / 3.0, x3, x3, x3, 0.0};
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  stepper.initialize(y, xi0, 1e-4);
  const double xi_max = 1e7;
  while (stepper.current_state()[0] > 0.0) {
    if (stepper.current_time() > xi_max)
      throw NumericalError("Lane-Emden shooting found no zero of the density below xi = 1e7");
    stepper.do_step(rhs);
  }
  double lo = stepper.previous_time(), hi = stepper.current_time();
  State mid{};
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double m = 0.5 * (lo + hi);
    stepper.calc_state(m, mid);
    (mid[0] > 0.0 ? lo : hi) = m;
  }
  stepper.calc_state(hi, mid);

  PolytropeSolution s;
  s.first_zero = hi;
  s.mass = mid[2];
  const double dirichlet = 4.0 * pi * mid[5] + 4.0 * pi * s.mass * s.mass / s.first_zero;
  s.ultra = c * 4.0 * pi * c4 * mid[3] / s.mass;
  s.potential = -dirichlet / (8.0 * pi) / (s.mass * s.mass);
  s.norm = c * std::pow(4.0 * pi * cb * mid[4], 1.0 / beta) / s.mass;
  s.objective = std::pow(s.ultra / -s.potential, 3.0 * (1.0 - 1.0 / beta)) * s.norm;
  return s;
}

/// Polytrope estimate of C_beta, beta > 3/2, with exponent k = 1/(beta - 1).
inline double polytrope_cbeta_estimate(double beta) {
  if (!(beta > 1.5)) throw InvalidArgument("polytrope estimate needs beta > 3/2");
  return polytrope_objective(beta, 1.0 / (beta - 1.0)).objective;
}

inline CriticalityReport criticality_report(double beta) {
  CriticalityReport r;
  r.beta = beta;
  r.bounds = cbeta_bounds(beta);
  if (beta > 1.5) r.estimate = polytrope_cbeta_estimate(beta);
  return r;
}

}  // namespace rvp
