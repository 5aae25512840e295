#pragma once

// Explicit trial densities: powers of h_- for a given potential, the double
// scaling f -> kappa^3 lambda^3 f(lambda p, kappa q), product densities and
// the admissible cusp window.

#include <algorithm>
#include <cmath>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/functionals.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/radial_profile.hpp"

namespace rvp {

/// h_-^theta / ||h_-||_theta^theta.
inline PhaseDensity power_hminus_density(const RadialProfile& phi, double theta) {
  if (!(theta > 0.0)) throw InvalidArgument("power_hminus_density needs theta > 0");
  require_nonpositive(phi);
  AnalyticForm form;
  form.base = AnalyticForm::Base::Hminus;
  form.phi = phi;
  form.theta = theta;
  double integral;
  try {
    integral = hminus_power_integral(phi, theta);
  } catch (const DivergenceError&) {
    throw DivergenceError("||phi||_" + std::to_string(3.0 + theta) + " of " + phi.label(), 3.0 + theta);
  }
  form.norm = 1.0 / integral;
  return PhaseDensity(DensityKind::HminusPower, form);
}

/// h_-^2 / ||h_-||_2^2.
inline PhaseDensity squared_hminus_density(const RadialProfile& phi) { return power_hminus_density(phi, 2.0); }

/// ||h_-^theta / ||h_-||_theta^theta||_beta = ||h_-||_{theta beta}^theta / ||h_-||_theta^theta.
inline double power_density_norm(const RadialProfile& phi, double theta, double beta) {
  const double num = std::pow(hminus_power_integral(phi, theta * beta), 1.0 / beta);
  return num / hminus_power_integral(phi, theta);
}

/// b(theta) in E_p^u(h_-^theta / ||h_-||_theta^theta) = b ||phi||_{theta+4}^{theta+4} / ||phi||_{theta+3}^{theta+3}.
inline double ultra_kinetic_constant(double theta) { return 3.0 / (4.0 + theta); }

/// E_p^u of the power density from two profile norms.
inline double power_density_ultra_energy(const RadialProfile& phi, double theta) {
  return ultra_kinetic_constant(theta) * profile_power_integral(phi, theta + 4.0) /
         profile_power_integral(phi, theta + 3.0);
}

/// f_{kappa,lambda}(p, q) = kappa^3 lambda^3 f(lambda p, kappa q). Ensembles map
/// r -> r/kappa, p_r -> p_r/lambda, L -> L/(kappa lambda).
inline PhaseDensity double_scale(const PhaseDensity& f, double kappa, double lambda) {
  if (!(kappa > 0.0) || !(lambda > 0.0)) throw InvalidArgument("double_scale needs kappa, lambda > 0");
  if (f.is_ensemble()) {
    std::vector<Characteristic> out = f.characteristics();
    for (auto& c : out) {
      c.r /= kappa;
      c.p_r /= lambda;
      c.L /= kappa * lambda;
    }
    return PhaseDensity(std::move(out));
  }
  AnalyticForm form = f.analytic();
  form.kappa *= kappa;
  form.lambda *= lambda;
  const DensityKind kind = (kappa == 1.0 && lambda == 1.0) ? f.kind() : DensityKind::DoubleScaled;
  return PhaseDensity(kind, form);
}

/// Restrict an analytic density to |p x q| >= L0 and renormalise.
inline PhaseDensity with_angular_cutoff(const PhaseDensity& f, double L0, const PhaseOptions& opts = {}) {
  if (!(L0 >= 0.0)) throw InvalidArgument("angular cutoff must be nonnegative");
  AnalyticForm form = f.analytic();
  form.angular_cutoff = L0 * form.kappa * form.lambda;
  const double mass = total_mass(PhaseDensity(f.kind(), form), opts);
  if (!(mass > 0.0)) throw InvalidArgument("angular cutoff removes all mass");
  form.norm /= mass;
  return PhaseDensity(f.kind(), form);
}

/// f_{kappa,lambda} with lambda chosen so that ||f_{kappa,lambda}||_{3/2} = target.
inline PhaseDensity rescale_to_norm(const PhaseDensity& f, double target, double kappa = 1.0,
                                    const PhaseOptions& opts = {}) {
  if (!(target > 0.0)) throw InvalidArgument("target norm must be positive");
  const double n = lp_norm(f, 1.5, opts);
  return double_scale(f, kappa, target / (n * kappa));
}

/// Cold core plus infalling halo as an equal-weight ensemble. Four fifths of
/// the mass sits at rest in a ball of radius core_radius, the rest in a shell
/// on [3.8, 4.2] falling in with p_r = -1. Every shell carries L = 1e-3.
inline std::vector<Characteristic> core_halo_ensemble(std::size_t n, double core_radius) {
  if (n < 5) throw InvalidArgument("core-halo ensemble needs n >= 5");
  if (!(core_radius > 0.0)) throw InvalidArgument("core radius must be positive");
  const std::size_t nc = n * 4 / 5, nh = n - nc;
  const double w = 1.0 / static_cast<double>(n);
  std::vector<Characteristic> ps;
  ps.reserve(n);
  for (std::size_t i = 0; i < nc; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(nc);
    ps.push_back({core_radius * std::cbrt(u), 0.0, 1e-3, w});
  }
  for (std::size_t i = 0; i < nh; ++i) {
    const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(nh);
    ps.push_back({3.8 + 0.4 * u, -1.0, 1e-3, w});
  }
  return ps;
}

/// Core-halo ensemble with the core radius bisected to E = 0. The halo makes
/// V = -0.8 regardless of the core.
inline std::vector<Characteristic> zero_energy_core_halo(std::size_t n) {
  auto e = [n](double rc) { return energy(PhaseDensity(core_halo_ensemble(n, rc))).total; };
  double lo = 0.01, hi = 10.0;
  if (!(e(lo) < 0.0 && e(hi) > 0.0)) throw NumericalError("core-halo energy does not change sign");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double m = 0.5 * (lo + hi);
    (e(m) > 0.0 ? hi : lo) = m;
  }
  // take the side with E <= 0 so the datum is never slightly positive
  return core_halo_ensemble(n, lo);
}

/// (16 pi^2 / 9)^(-1) R^(-3) on B_1(0) x B_R(0).
inline PhaseDensity product_density(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("product density needs R > 0");
  AnalyticForm form;
  form.base = AnalyticForm::Base::Product;
  form.radius = radius;
  form.norm = 9.0 / (16.0 * quad::kPi * quad::kPi) / (radius * radius * radius);
  return PhaseDensity(DensityKind::Product, form);
}

struct DeltaWindow {
  double lower = 0.0;  // inclusive
  double upper = 0.0;  // exclusive
  bool empty() const { return !(upper > lower); }
  bool contains(double d) const { return d >= lower && d < upper; }
};

/// Open interval (2, 3/(5 beta - 6)) of theta with a nonempty delta window.
inline std::pair<double, double> cusp_theta_range(double beta) {
  if (!(beta >= 1.2 && beta < 1.5)) throw InvalidArgument("cusp window needs beta in [6/5, 3/2)");
  const double hi = beta == 1.2 ? INFINITY : 3.0 / (5.0 * beta - 6.0);
  return {2.0, hi};
}

/// [5/(6+2 theta), min{3/(3+theta beta), 3/(4+theta)}).
inline DeltaWindow cusp_admissible_window(double beta, double theta) {
  cusp_theta_range(beta);
  DeltaWindow w;
  w.lower = 5.0 / (6.0 + 2.0 * theta);
  w.upper = std::min(3.0 / (3.0 + theta * beta), 3.0 / (4.0 + theta));
  if (w.empty()) w.upper = w.lower;
  return w;
}

/// theta = 1/(beta - 1) balances how far the beta-norm and the ultra-kinetic
/// energy sit from divergence at the lower end of the delta window.
inline double default_cusp_theta(double beta) {
  cusp_theta_range(beta);
  return 1.0 / (beta - 1.0);
}

}  // namespace rvp
