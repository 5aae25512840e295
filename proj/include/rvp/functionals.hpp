#pragma once

// Scalar functionals of a phase-space density: energies, the field-form
// energy and its ultra-relativistic variant, norms of h_- = (|p| + phi)_-,
// Casimirs, relative entropy and the virial.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/quadrature.hpp"
#include "rvp/radial_field.hpp"
#include "rvp/radial_profile.hpp"

namespace rvp {

struct EnergyBreakdown {
  double total = 0.0;          // E = E_p + E_q
  double kinetic = 0.0;        // E_p = \iint sqrt(1+|p|^2) f
  double potential = 0.0;      // E_q = -(1/8 pi) ||grad phi||_2^2
  double ultra = 0.0;          // E_p^u = \iint |p| f
  double inverse_gamma = 0.0;  // \iint (1+|p|^2)^(-1/2) f
};

struct EnergyOptions {
  RadialGrid grid{};
  PhaseOptions phase{};
};

/// E_q of an ensemble of shells: -sum_k w_k (M_{<k} + w_k/2) / r_k, the
/// exact field energy of concentric shells.
inline double shell_potential_energy(const std::vector<Characteristic>& ens) {
  std::vector<std::size_t> order(ens.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ens[a].r < ens[b].r; });
  double inner = 0.0;
  double e = 0.0;
  for (std::size_t k : order) {
    e -= ens[k].w * (inner + 0.5 * ens[k].w) / ens[k].r;
    inner += ens[k].w;
  }
  return e;
}

/// Self-consistent field of an analytic density on `grid`.
inline RadialField self_field(const PhaseDensity& f, const RadialGrid& grid = {}) {
  return solve_field(project_spatial_density(f, grid));
}

inline EnergyBreakdown energy(const PhaseDensity& f, const EnergyOptions& opts = {}) {
  EnergyBreakdown e;
  if (f.is_ensemble()) {
    const auto& ens = f.characteristics();
    for (const auto& c : ens) {
      const double g = c.gamma();
      e.kinetic += c.w * g;
      e.ultra += c.w * c.momentum();
      e.inverse_gamma += c.w / g;
    }
    e.potential = shell_potential_energy(ens);
  } else {
    const auto& a = f.analytic();
    e.kinetic = phase_integral_or_throw(
        a, [](double s, double, double v) { return std::sqrt(1.0 + s * s) * v; }, "E_p", 1.0, opts.phase);
    e.ultra = phase_integral_or_throw(
        a, [](double s, double, double v) { return s * v; }, "E_p^u", 1.0, opts.phase);
    e.inverse_gamma = phase_integral_or_throw(
        a, [](double s, double, double v) { return v / std::sqrt(1.0 + s * s); }, "inverse gamma", 1.0,
        opts.phase);
    e.potential = -self_field(f, opts.grid).dirichlet / (8.0 * quad::kPi);
  }
  e.total = e.kinetic + e.potential;
  return e;
}

namespace detail {

template <class Kinetic>
double field_form(const PhaseDensity& f, const RadialProfile& phi, Kinetic kin, const PhaseOptions& opts) {
  require_nonpositive(phi);
  double coupled = 0.0;
  if (f.is_ensemble()) {
    for (const auto& c : f.characteristics()) coupled += c.w * (kin(c.momentum()) + phi(c.r));
  } else {
    coupled = phase_integral_or_throw(
        f.analytic(), [&](double s, double r, double v) { return (kin(s) + phi(r)) * v; },
        "field-form energy", 1.0, opts);
  }
  return coupled + dirichlet_energy(phi) / (8.0 * quad::kPi);
}

}  // namespace detail

/// \iint (sqrt(1+|p|^2) + phi) f + (1/8 pi) ||grad phi||^2 for an arbitrary phi <= 0.
inline double field_form_energy(const PhaseDensity& f, const RadialProfile& phi, const PhaseOptions& opts = {}) {
  return detail::field_form(f, phi, [](double s) { return std::sqrt(1.0 + s * s); }, opts);
}

/// As field_form_energy with sqrt(1+|p|^2) replaced by |p|.
inline double kato_form(const PhaseDensity& f, const RadialProfile& phi, const PhaseOptions& opts = {}) {
  return detail::field_form(f, phi, [](double s) { return s; }, opts);
}

/// ||h_-||_tau^tau = 8 pi / ((1+tau)(2+tau)(3+tau)) ||phi_-||_{3+tau}^{3+tau}.
inline double hminus_power_integral(const RadialProfile& phi, double tau) {
  if (!(tau > 0.0)) throw InvalidArgument("hminus norm needs tau > 0");
  const double prod = (1.0 + tau) * (2.0 + tau) * (3.0 + tau);
  return 8.0 * quad::kPi / prod * profile_power_integral(phi, 3.0 + tau);
}

inline double hminus_norm(const RadialProfile& phi, double tau) {
  if (!(tau >= 1.0)) throw InvalidArgument("hminus_norm needs tau >= 1");
  return std::pow(hminus_power_integral(phi, tau), 1.0 / tau);
}

/// \iint g(f); g must vanish at 0.
inline double casimir(const PhaseDensity& f, const std::function<double(double)>& g, const PhaseOptions& opts = {}) {
  if (f.is_ensemble()) throw UnsupportedRepresentation("Casimir functional of an atomic ensemble");
  return phase_integral_or_throw(
      f.analytic(), [&](double, double, double v) { return v > 0.0 ? g(v) : 0.0; }, "Casimir", 1.0, opts);
}

/// -\iint f log(f / f_*), with the integrand set to 0 where f = 0.
inline double relative_entropy(const PhaseDensity& f, const PhaseDensity& reference, const PhaseOptions& opts = {}) {
  if (f.is_ensemble() || reference.is_ensemble())
    throw UnsupportedRepresentation("relative entropy of an atomic ensemble");
  const auto& ref = reference.analytic();
  return phase_integral_or_throw(
      f.analytic(),
      [&](double s, double r, double v) {
        if (v <= 0.0) return 0.0;
        const double w = ref.value(s, r);
        if (!(w > 0.0)) return -std::numeric_limits<double>::infinity();
        return -v * std::log(v / w);
      },
      "relative entropy", 1.0, opts);
}

/// V = \iint q.p f; sum w r p_r for ensembles. Analytic forms here are even
/// in p.q, so their virial vanishes.
inline double virial(const PhaseDensity& f) {
  if (!f.is_ensemble()) return 0.0;
  double v = 0.0;
  for (const auto& c : f.characteristics()) v += c.w * c.r * c.p_r;
  return v;
}

/// Linear momentum; identically zero in the spherical reduction.
inline std::array<double, 3> momentum(const PhaseDensity&) { return {0.0, 0.0, 0.0}; }

/// Total angular momentum; the isotropic angular average cancels it.
inline std::array<double, 3> angular_momentum(const PhaseDensity&) { return {0.0, 0.0, 0.0}; }

}  // namespace rvp
