#pragma once

// Turning an analytic density into an equal-weight ensemble of
// characteristics. Latin-hypercube strata in (r, |p|, mu) with mu the cosine
// of the angle between p and q; inverse CDFs are tabulated.
//
// Randomness: std::mt19937_64 seeded by the caller. Uniforms are built as
// (x >> 11) * 2^-53 and permutations by an explicit Fisher-Yates shuffle so
// the ensemble is identical across standard libraries.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/quadrature.hpp"

namespace rvp {

class UniformSource {
 public:
  explicit UniformSource(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = i;
    for (std::size_t i = n; i > 1; --i) {
      const auto j = static_cast<std::size_t>(next() * static_cast<double>(i));
      std::swap(p[i - 1], p[std::min(j, i - 1)]);
    }
    return p;
  }

 private:
  std::mt19937_64 engine_;
};

namespace detail {

/// Inverse of a tabulated monotone CDF by linear interpolation.
inline double invert_table(const std::vector<double>& x, const std::vector<double>& cdf, double u) {
  const double target = u * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
  if (it == cdf.begin()) return x.front();
  if (it == cdf.end()) return x.back();
  const std::size_t i = static_cast<std::size_t>(it - cdf.begin());
  const double span = cdf[i] - cdf[i - 1];
  const double t = span > 0.0 ? (target - cdf[i - 1]) / span : 0.5;
  return x[i - 1] + t * (x[i] - x[i - 1]);
}

}  // namespace detail

struct SamplingOptions {
  std::size_t radial_nodes = 4096;
  std::size_t momentum_nodes = 512;
  /// Radial range in units of 1/kappa for potentials with unbounded support.
  double inner = 1e-5;
  double outer = 1e4;
};

/// N equal-weight characteristics drawn from an analytic density.
inline std::vector<Characteristic> sample_characteristics(const PhaseDensity& f, std::size_t n, std::uint64_t seed,
                                                          const SamplingOptions& opts = {}) {
  if (n == 0) throw InvalidArgument("sample size must be positive");
  const AnalyticForm& a = f.analytic();
  if (a.angular_cutoff <= 0.0)
    throw InvalidArgument("sampling needs an angular-momentum cutoff so that no characteristic has L = 0");

  // radial CDF on a log-spaced table (u = ln r)
  double r_lo = opts.inner / a.kappa;
  double r_hi = std::min(opts.outer / a.kappa, a.support_radius());
  std::vector<double> u(opts.radial_nodes), cdf(opts.radial_nodes, 0.0);
  const double du = std::log(r_hi / r_lo) / static_cast<double>(opts.radial_nodes - 1);
  auto shell = [&](double r) { return 4.0 * quad::kPi * r * r * analytic_density_at(a, r); };
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::log(r_lo) + du * static_cast<double>(i);
  for (std::size_t i = 1; i < u.size(); ++i)
    cdf[i] = cdf[i - 1] + quad::integrate_log_radius(shell, std::exp(u[i - 1]), std::exp(u[i]), 1e-10, 8);

  UniformSource rng(seed);
  const auto perm_r = rng.permutation(n);
  const auto perm_s = rng.permutation(n);
  const auto perm_mu = rng.permutation(n);
  const double weight = 1.0 / static_cast<double>(n);
  const std::size_t gl = opts.momentum_nodes;

  std::vector<Characteristic> out(n);
  std::vector<double> v(gl), mcdf(gl);
  for (std::size_t i = 0; i < n; ++i) {
    const double ur = (static_cast<double>(perm_r[i]) + rng.next()) / static_cast<double>(n);
    const double us = (static_cast<double>(perm_s[i]) + rng.next()) / static_cast<double>(n);
    const double um = (static_cast<double>(perm_mu[i]) + rng.next()) / static_cast<double>(n);
    double r = std::exp(detail::invert_table(u, cdf, ur));
    // interpolation inside a table cell can land just short of the region the
    // angular cutoff leaves open; step outward to its edge
    for (int guard = 0; !(a.momentum_limit(r) > a.momentum_floor(r)); ++guard) {
      if (guard > 200000) throw NumericalError("sampled radius outside the momentum support");
      r *= 1.0 + 1e-5;
    }

    // conditional law of |p| on [lo, hi] with s = lo + (hi - lo) v^2
    const double lo = a.momentum_floor(r), hi = a.momentum_limit(r);
    auto weight_at = [&](double vv) {
      const double s = lo + (hi - lo) * vv * vv;
      return 2.0 * vv * s * s * a.angular_fraction(s, r) * a.value(s, r);
    };
    mcdf[0] = 0.0;
    v[0] = 0.0;
    double prev = weight_at(0.0);
    for (std::size_t k = 1; k < gl; ++k) {
      v[k] = static_cast<double>(k) / static_cast<double>(gl - 1);
      const double cur = weight_at(v[k]);
      mcdf[k] = mcdf[k - 1] + 0.5 * (prev + cur);
      prev = cur;
    }
    const double vs = detail::invert_table(v, mcdf, us);
    const double s = lo + (hi - lo) * vs * vs;

    // uniform direction restricted to |p x q| >= L0
    const double mu_max = a.angular_fraction(s, r);
    const double mu = mu_max * (2.0 * um - 1.0);
    Characteristic c;
    c.r = r;
    c.p_r = s * mu;
    // rounding can push L a hair below the cutoff
    c.L = std::max(s * r * std::sqrt(std::max(1.0 - mu * mu, 0.0)), a.angular_cutoff / (a.kappa * a.lambda));
    c.w = weight;
    out[i] = c;
  }
  return out;
}

}  // namespace rvp
