#pragma once

// Spherically symmetric Poisson solve: enclosed mass, potential, force and
// Dirichlet energy on a radial grid.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/grid.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/quadrature.hpp"

namespace rvp {

struct RadialField {
  RadialGrid grid;
  std::vector<double> mass;       // M(r_i)
  std::vector<double> potential;  // phi(r_i) of the distributed mass
  std::vector<double> density;    // rho(r_i), used as dM/dr = 4 pi r^2 rho
  double total_mass = 0.0;
  double truncated_mass = 0.0;
  double dirichlet = 0.0;
  /// Point mass at the origin (frozen-field tests); zero for self-consistent fields.
  double central_mass = 0.0;

  /// M(r) by cubic Hermite interpolation in r.
  double enclosed(double r) const {
    if (r <= 0.0) return central_mass;
    double m;
    if (r <= grid.r_min()) {
      const double x = r / grid.r_min();
      m = mass.front() * x * x * x;
    } else if (r >= grid.r_max()) {
      m = total_mass;
    } else {
      const std::size_t i = grid.interval(r);
      m = hermite(i, r);
    }
    return m + central_mass;
  }

  double force(double r) const {
    if (r <= 0.0) {
      if (central_mass > 0.0) throw InvalidArgument("force of a point mass at r = 0");
      return 0.0;
    }
    return enclosed(r) / (r * r);
  }

  double potential_at(double r) const {
    if (r >= grid.r_max()) return -(total_mass + central_mass) / r;
    double phi;
    if (r <= grid.r_min()) {
      const double r0 = grid.r_min();
      phi = potential.front() - 0.5 * mass.front() / r0 * (1.0 - (r * r) / (r0 * r0));
    } else {
      // phi = -M/r - outer with both pieces cubic Hermite; d(outer)/dr = -4 pi r rho
      const std::size_t i = grid.interval(r);
      const double a = grid[i], b = grid[i + 1], h = b - a;
      const double t = (r - a) / h, t2 = t * t, t3 = t2 * t;
      const double oa = -potential[i] - mass[i] / a, ob = -potential[i + 1] - mass[i + 1] / b;
      const double da = -4.0 * quad::kPi * a * density[i], db = -4.0 * quad::kPi * b * density[i + 1];
      const double outer = (2 * t3 - 3 * t2 + 1) * oa + (t3 - 2 * t2 + t) * h * da + (-2 * t3 + 3 * t2) * ob +
                           (t3 - t2) * h * db;
      phi = -hermite(i, r) / r - outer;
    }
    // the stored potential excludes the central point mass
    return phi - central_mass / r;
  }

  double hermite(std::size_t i, double r) const {
    const double a = grid[i], b = grid[i + 1];
    const double h = b - a;
    const double t = (r - a) / h;
    const double da = 4.0 * quad::kPi * a * a * density[i];
    const double db = 4.0 * quad::kPi * b * b * density[i + 1];
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * mass[i] + (t3 - 2 * t2 + t) * h * da +
           (-2 * t3 + 3 * t2) * mass[i + 1] + (t3 - t2) * h * db;
  }
};

namespace detail {

/// Gauss-Legendre on [a, b], split at any breakpoint inside.
template <class F>
double interval_integral(F&& f, double a, double b, const std::vector<double>& breakpoints) {
  const auto& gl = quad::gauss_legendre(16);
  auto piece = [&](double lo, double hi) {
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) s += gl.weights[k] * f(lo + (hi - lo) * gl.nodes[k]);
    return s * (hi - lo);
  };
  double total = 0.0, lo = a;
  for (double bp : breakpoints) {
    if (bp > lo && bp < b) {
      total += piece(lo, bp);
      lo = bp;
    }
  }
  return total + piece(lo, b);
}

}  // namespace detail

/// M(r_i) = 4 pi \int_0^{r_i} rho s^2 ds: per-interval quadrature of the exact
/// density when available, cumulative trapezoid in ln r otherwise.
inline std::vector<double> enclosed_mass(const SpatialDensity& rho) {
  const auto& g = rho.grid;
  std::vector<double> m(g.size(), 0.0);
  if (rho.exact) {
    auto shell = [&](double r) { return 4.0 * quad::kPi * r * r * rho.exact(r); };
    m[0] = quad::integrate(shell, 0.0, g[0], 1e-10);
    for (std::size_t i = 1; i < g.size(); ++i)
      m[i] = m[i - 1] + detail::interval_integral(shell, g[i - 1], g[i], rho.breakpoints);
    return m;
  }
  std::vector<double> integrand(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    integrand[i] = 4.0 * quad::kPi * g[i] * g[i] * g[i] * rho.values[i];
  return quad::cumulative_trapezoid(integrand, g.log_step());
}

namespace detail {

/// \int_0^\infty 4 pi r^2 (M/r^2)^2 dr with Hermite M between nodes.
inline double field_dirichlet(const RadialField& f) {
  const auto& g = f.grid;
  const auto& gl = quad::gauss_legendre(6);
  const double r0 = g.r_min();
  double total = 4.0 * quad::kPi * f.mass.front() * f.mass.front() / (5.0 * r0);
  for (std::size_t i = 0; i + 1 < g.size(); ++i) {
    const double a = g[i], h = g[i + 1] - g[i];
    double s = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
      const double r = a + h * gl.nodes[k];
      const double m = f.hermite(i, r);
      s += gl.weights[k] * m * m / (r * r);
    }
    total += 4.0 * quad::kPi * h * s;
  }
  // exterior: M ~ total mass beyond r_max
  total += 4.0 * quad::kPi * f.total_mass * f.total_mass / g.r_max();
  return total;
}

}  // namespace detail

/// Solve for M, phi and the Dirichlet energy. phi(r) = -M(r)/r - 4 pi \int_r^\infty rho s ds.
inline RadialField solve_field(const SpatialDensity& rho) {
  const auto& g = rho.grid;
  RadialField f;
  f.grid = g;
  f.density = rho.values;
  f.mass = enclosed_mass(rho);
  const std::size_t n = g.size();

  // outer integral 4 pi \int_r^\infty rho s ds, accumulated from the outside in
  std::vector<double> outer(n, 0.0);
  if (rho.exact) {
    auto moment = [&](double r) { return 4.0 * quad::kPi * r * rho.exact(r); };
    double tail = 0.0;
    if (rho.tail_mass > 0.0) {
      const double rmax = g.r_max();
      auto beyond = [&](double r) { return r < rmax ? 0.0 : moment(r); };
      quad::RadialRule rule;
      rule.inner = 1e-3;
      rule.outer = 1e4;
      rule.breakpoints = {rmax};
      const auto res = quad::radial_integral(beyond, rule);
      if (res.divergent) throw DivergenceError("potential tail 4 pi \\int rho s ds", 1.0);
      tail = res.value;
    }
    outer[n - 1] = tail;
    for (std::size_t i = n - 1; i-- > 0;)
      outer[i] = outer[i + 1] + detail::interval_integral(moment, g[i], g[i + 1], rho.breakpoints);
    f.truncated_mass = 0.0;
    f.total_mass = f.mass.back() + rho.tail_mass;
  } else {
    const double h = g.log_step();
    for (std::size_t i = n - 1; i-- > 0;) {
      const double a = 4.0 * quad::kPi * g[i] * g[i] * rho.values[i];
      const double b = 4.0 * quad::kPi * g[i + 1] * g[i + 1] * rho.values[i + 1];
      outer[i] = outer[i + 1] + 0.5 * h * (a + b);
    }
    f.total_mass = f.mass.back();
    f.truncated_mass = rho.tail_mass;
  }
  f.potential.resize(n);
  for (std::size_t i = 0; i < n; ++i) f.potential[i] = -f.mass[i] / g[i] - outer[i];
  f.dirichlet = detail::field_dirichlet(f);
  return f;
}

/// phi on the grid.
inline std::vector<double> potential(const SpatialDensity& rho) { return solve_field(rho).potential; }

/// |grad phi|(r) = M(r)/r^2.
inline double radial_force(const RadialField& field, double r) {
  if (r < 0.0) throw InvalidArgument("radial_force needs r >= 0");
  return field.force(r);
}

inline double dirichlet_energy(const RadialField& field) { return field.dirichlet; }

inline void write_field_csv(std::ostream& os, const RadialField& f) {
  os << "r,M,phi,force\n";
  char buf[160];
  for (std::size_t i = 0; i < f.grid.size(); ++i) {
    const double r = f.grid[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r, f.mass[i] + f.central_mass,
                  f.potential[i] - f.central_mass / r, (f.mass[i] + f.central_mass) / (r * r));
    os << buf;
  }
}

}  // namespace rvp
