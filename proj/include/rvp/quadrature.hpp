#pragma once

// Quadrature building blocks: adaptive Gauss-Kronrod on the logarithmic radial
// axis, Gauss-Legendre nodes for the bounded momentum integrals, and the
// refinement ladder used to tell finite integrals from divergent ones.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "rvp/errors.hpp"

namespace rvp::quad {

inline constexpr double kPi = std::numbers::pi;

/// Abscissae and weights of an n-point Gauss-Legendre rule on [0, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussLegendreRule make_gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1, 1] -> [0, 1]
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.nodes[n - 1 - i] = 0.5 * (1.0 + x);
    rule.weights[i] = 0.5 * w;
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

/// Cached rule; safe to call from several threads.
inline const GaussLegendreRule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, GaussLegendreRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

/// Adaptive Gauss-Kronrod (31 point) of F over [a, b].
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 18) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol,
                                                                       &error);
}

/// \int_a^b F(r) dr evaluated in u = ln r, which resolves power laws over many decades.
template <class F>
double integrate_log_radius(F&& f, double a, double b, double rel_tol = 1e-12,
                            unsigned max_depth = 18) {
  if (!(b > a) || !(a > 0.0)) return 0.0;
  auto g = [&](double u) {
    const double r = std::exp(u);
    return f(r) * r;
  };
  return integrate(g, std::log(a), std::log(b), rel_tol, max_depth);
}

/// Domain ladder for \int_0^\infty F(r) dr. Level n uses
/// [inner^(2^n), outer^(2^n)], i.e. each level doubles the number of decades
/// resolved at both ends.
struct RadialRule {
  double inner = 1e-8;
  double outer = 1e4;
  int levels = 4;
  double rel_tol = 1e-12;
  /// Hard upper end for compactly supported integrands (infinite by default).
  double support_end = INFINITY;
  /// Points inside the domain where the integrand has kinks or jumps.
  std::vector<double> breakpoints{};
};

struct RadialIntegral {
  double value = 0.0;
  bool divergent = false;
  std::vector<double> levels;
};

namespace detail {

template <class F>
double integrate_pieces(F& f, double a, double b, const RadialRule& rule) {
  if (!(b > a)) return 0.0;
  double total = 0.0;
  double lo = a;
  for (double bp : rule.breakpoints) {
    if (bp > lo && bp < b) {
      total += integrate_log_radius(f, lo, bp, rule.rel_tol);
      lo = bp;
    }
  }
  total += integrate_log_radius(f, lo, b, rule.rel_tol);
  return total;
}

}  // namespace detail

/// Divergence rule: the integral is declared divergent when every one of the
/// successive refinements increases the magnitude by more than 10 percent.
inline bool growth_signals_divergence(std::span<const double> levels, double threshold = 0.10) {
  if (levels.size() < 2) return false;
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) return true;
    const double prev = std::abs(levels[i - 1]);
    const double grow = std::abs(levels[i]) - prev;
    if (!(grow > threshold * prev)) return false;
  }
  return true;
}

/// \int_0^\infty F(r) dr on the refinement ladder of `rule`.
template <class F>
RadialIntegral radial_integral(F&& f, const RadialRule& rule = {}) {
  RadialIntegral out;
  std::vector<double> lo(rule.levels), hi(rule.levels);
  for (int n = 0; n < rule.levels; ++n) {
    const double power = std::ldexp(1.0, n);
    lo[n] = std::pow(rule.inner, power);
    hi[n] = std::min(std::pow(rule.outer, power), rule.support_end);
  }
  double running = detail::integrate_pieces(f, lo[0], hi[0], rule);
  out.levels.push_back(running);
  for (int n = 1; n < rule.levels; ++n) {
    running += detail::integrate_pieces(f, lo[n], lo[n - 1], rule);
    running += detail::integrate_pieces(f, hi[n - 1], hi[n], rule);
    out.levels.push_back(running);
  }
  out.value = running;
  out.divergent = growth_signals_divergence(out.levels) || !std::isfinite(running);
  return out;
}

/// Cumulative trapezoid of samples on a uniform axis with spacing h.
inline std::vector<double> cumulative_trapezoid(std::span<const double> values, double h) {
  std::vector<double> out(values.size(), 0.0);
  for (std::size_t i = 1; i < values.size(); ++i)
    out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
  return out;
}

}  // namespace rvp::quad
