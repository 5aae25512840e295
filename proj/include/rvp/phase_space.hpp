#pragma once

// Phase-space densities in the spherical reduction. Analytic forms depend on
// (s, r) = (|p|, |q|) and optionally on the angle between p and q through a
// lower cutoff on the angular momentum L = |p x q|; ensembles are weighted
// characteristics (r, p_r, L, w).

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rvp/errors.hpp"
#include "rvp/grid.hpp"
#include "rvp/quadrature.hpp"
#include "rvp/radial_profile.hpp"

namespace rvp {

/// One characteristic in reduced coordinates.
struct Characteristic {
  double r = 0.0;
  double p_r = 0.0;
  double L = 0.0;
  double w = 0.0;

  double momentum() const { return std::sqrt(p_r * p_r + L * L / (r * r)); }
  double gamma() const { return std::sqrt(1.0 + p_r * p_r + L * L / (r * r)); }
};

inline constexpr double kZeroAngularMomentum = 1e-12;

enum class DensityKind { HminusPower, DoubleScaled, Product, Ensemble };

inline const char* to_string(DensityKind k) {
  switch (k) {
    case DensityKind::HminusPower: return "analytic-hminus-power";
    case DensityKind::DoubleScaled: return "analytic-double-scaled";
    case DensityKind::Product: return "analytic-product";
    case DensityKind::Ensemble: return "ensemble";
  }
  return "?";
}

/// Closed-form density kappa^3 lambda^3 c g(lambda s, kappa r) where the base
/// g is either (-phi(r) - s)_+^theta or the indicator of |p| <= 1, |q| <= R.
/// A positive angular cutoff L0 (in base coordinates) removes the part of
/// phase space with |p x q| < L0.
struct AnalyticForm {
  enum class Base { Hminus, Product };

  Base base = Base::Hminus;
  RadialProfile phi;
  double theta = 2.0;
  double radius = 1.0;
  double norm = 1.0;
  double kappa = 1.0;
  double lambda = 1.0;
  double angular_cutoff = 0.0;

  double base_limit(double rb) const {
    if (base == Base::Product) return rb <= radius ? 1.0 : 0.0;
    return std::max(-phi(rb), 0.0);
  }

  double base_value(double sb, double rb) const {
    if (base == Base::Product) return (sb <= 1.0 && rb <= radius) ? 1.0 : 0.0;
    const double h = -phi(rb) - sb;
    return h > 0.0 ? std::pow(h, theta) : 0.0;
  }

  /// f at |p| = s, |q| = r on the allowed angular set.
  double value(double s, double r) const {
    const double k3 = kappa * kappa * kappa * lambda * lambda * lambda;
    return norm * k3 * base_value(lambda * s, kappa * r);
  }

  /// Upper end of the momentum support at radius r.
  double momentum_limit(double r) const { return base_limit(kappa * r) / lambda; }

  /// Lower end of the momentum support imposed by the angular cutoff.
  double momentum_floor(double r) const {
    if (angular_cutoff <= 0.0) return 0.0;
    return angular_cutoff / (kappa * r) / lambda;
  }

  /// Fraction of directions of p with |p x q| >= L0.
  double angular_fraction(double s, double r) const {
    if (angular_cutoff <= 0.0) return 1.0;
    const double x = angular_cutoff / (lambda * s * kappa * r);
    return x >= 1.0 ? 0.0 : std::sqrt(1.0 - x * x);
  }

  /// Radius beyond which f vanishes (infinite for potentials with full support).
  double support_radius() const {
    if (base == Base::Product) return radius / kappa;
    return INFINITY;
  }
};

struct PhaseOptions {
  int momentum_nodes = 64;
  quad::RadialRule radial{};
};

class PhaseDensity {
 public:
  /// Analytic density; `kind` must not be Ensemble.
  PhaseDensity(DensityKind kind, AnalyticForm form) : kind_(kind), payload_(std::move(form)) {
    if (kind == DensityKind::Ensemble) throw InvalidArgument("analytic payload given for an ensemble");
  }

  /// Ensemble of characteristics; validates weights and angular momenta.
  explicit PhaseDensity(std::vector<Characteristic> ensemble, double mass_tol = 1e-9)
      : kind_(DensityKind::Ensemble) {
    double total = 0.0;
    for (const auto& c : ensemble) {
      if (!(c.w >= 0.0)) throw InvalidArgument("negative characteristic weight");
      if (!(c.r > 0.0)) throw InvalidArgument("characteristic with r <= 0");
      if (!(c.L >= kZeroAngularMomentum))
        throw InvalidArgument("characteristic with vanishing angular momentum (L < 1e-12)");
      total += c.w;
    }
    if (std::abs(total - 1.0) > mass_tol)
      throw InvalidArgument("ensemble weights sum to " + std::to_string(total) + ", expected 1");
    payload_ = std::move(ensemble);
  }

  DensityKind kind() const noexcept { return kind_; }
  bool is_ensemble() const noexcept { return kind_ == DensityKind::Ensemble; }

  const AnalyticForm& analytic() const {
    if (is_ensemble()) throw UnsupportedRepresentation("ensemble has no analytic form");
    return std::get<AnalyticForm>(payload_);
  }
  const std::vector<Characteristic>& characteristics() const {
    if (!is_ensemble()) throw UnsupportedRepresentation("analytic density has no characteristics");
    return std::get<std::vector<Characteristic>>(payload_);
  }

 private:
  DensityKind kind_;
  std::variant<AnalyticForm, std::vector<Characteristic>> payload_;
};

/// Radial quadrature rule adapted to an analytic form.
inline quad::RadialRule phase_rule(const AnalyticForm& f, const PhaseOptions& opts) {
  quad::RadialRule rule = opts.radial;
  if (f.base == AnalyticForm::Base::Product) {
    rule.support_end = f.support_radius();
    rule.breakpoints.push_back(f.support_radius());
  } else if (!f.phi.singular_at_origin()) {
    rule.inner = std::max(rule.inner, 1e-6 / f.kappa);
  }
  return rule;
}

/// \int dp of G(s, r, f(s, r)) over the momentum support at radius r, i.e.
/// \int 4 pi s^2 frac(s, r) G ds. G must vanish where f vanishes.
template <class G>
double momentum_integral(const AnalyticForm& f, double r, G&& g, int nodes = 64) {
  const double hi = f.momentum_limit(r);
  const double lo = f.momentum_floor(r);
  if (!(hi > lo)) return 0.0;
  const auto& rule = quad::gauss_legendre(nodes);
  const double width = hi - lo;
  double total = 0.0;
  if (lo > 0.0) {
    // s = lo + width v^2 removes the square-root edge of the angular fraction
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double v = rule.nodes[i];
      const double s = lo + width * v * v;
      const double jac = 2.0 * width * v;
      total += rule.weights[i] * jac * s * s * f.angular_fraction(s, r) * g(s, r, f.value(s, r));
    }
  } else {
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double s = width * rule.nodes[i];
      total += rule.weights[i] * width * s * s * g(s, r, f.value(s, r));
    }
  }
  return 4.0 * quad::kPi * total;
}

/// \iint G(s, r, f) dp dq with divergence detection on the radial ladder.
template <class G>
quad::RadialIntegral phase_integral(const AnalyticForm& f, G&& g, const PhaseOptions& opts = {}) {
  auto radial = [&](double r) {
    return 4.0 * quad::kPi * r * r * momentum_integral(f, r, g, opts.momentum_nodes);
  };
  return quad::radial_integral(radial, phase_rule(f, opts));
}

/// As phase_integral but throws DivergenceError naming `what`.
template <class G>
double phase_integral_or_throw(const AnalyticForm& f, G&& g, const std::string& what,
                               double exponent, const PhaseOptions& opts = {}) {
  const auto res = phase_integral(f, std::forward<G>(g), opts);
  if (res.divergent) throw DivergenceError(what, exponent);
  return res.value;
}

/// rho(r) = \int f dp of an analytic form; closed form without angular cutoff.
inline double analytic_density_at(const AnalyticForm& f, double r, int nodes = 64) {
  if (f.angular_cutoff <= 0.0) {
    const double k3 = f.kappa * f.kappa * f.kappa;
    if (f.base == AnalyticForm::Base::Product)
      return (f.kappa * r <= f.radius) ? f.norm * k3 * 4.0 * quad::kPi / 3.0 : 0.0;
    const double a = f.base_limit(f.kappa * r);
    const double t = f.theta;
    // \int_0^a 4 pi s^2 (a - s)^t ds = 4 pi a^(3+t) B(3, t+1)
    return f.norm * k3 * 4.0 * quad::kPi * std::pow(a, 3.0 + t) * 2.0 /
           ((t + 1.0) * (t + 2.0) * (t + 3.0));
  }
  return momentum_integral(f, r, [](double, double, double v) { return v; }, nodes);
}

/// Spatial density sampled on a radial grid. `exact` carries the analytic
/// rho(r) when known so that downstream integrals need not interpolate.
struct SpatialDensity {
  RadialGrid grid;
  std::vector<double> values;
  double total_mass = 1.0;
  /// Mass beyond r_max (analytic tails; always 0 for ensembles).
  double tail_mass = 0.0;
  std::function<double(double)> exact;
  /// Radii where `exact` jumps (edge of a compact support).
  std::vector<double> breakpoints;

  double mass_on_grid() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) m += values[i] * grid.control_volume(i);
    return m;
  }
};

struct ProjectionOptions {
  /// Largest mass fraction an analytic density may have outside the grid.
  double support_tolerance = 1e-4;
  int momentum_nodes = 64;
};

inline double total_mass(const PhaseDensity& f, const PhaseOptions& opts = {});

/// rho = \int f dp on `grid`. Ensembles are deposited linearly in r onto the
/// two bracketing nodes and normalised by the trapezoid control volumes, so
/// the trapezoid mass equals sum w.
inline SpatialDensity project_spatial_density(const PhaseDensity& f, const RadialGrid& grid,
                                              const ProjectionOptions& opts = {}) {
  SpatialDensity out;
  out.grid = grid;
  out.values.assign(grid.size(), 0.0);
  if (f.is_ensemble()) {
    std::vector<double> node_mass(grid.size(), 0.0);
    double escaping = 0.0;
    double mass = 0.0;
    for (const auto& c : f.characteristics()) {
      mass += c.w;
      if (c.r > grid.r_max()) {
        escaping += c.w;
        continue;
      }
      if (c.r <= grid.r_min()) {
        node_mass[0] += c.w;
        continue;
      }
      const std::size_t i = grid.interval(c.r);
      const double t = (c.r - grid[i]) / (grid[i + 1] - grid[i]);
      node_mass[i] += c.w * (1.0 - t);
      node_mass[i + 1] += c.w * t;
    }
    if (escaping > 0.0) throw SupportError(escaping / mass);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = node_mass[i] / grid.control_volume(i);
    out.total_mass = mass;
    return out;
  }

  const AnalyticForm form = f.analytic();
  const int nodes = opts.momentum_nodes;
  auto rho = [form, nodes](double r) { return analytic_density_at(form, r, nodes); };
  for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = rho(grid[i]);
  out.exact = rho;
  if (std::isfinite(form.support_radius())) out.breakpoints.push_back(form.support_radius());
  auto shell = [&](double r) { return 4.0 * quad::kPi * r * r * rho(r); };
  double tail = 0.0;
  if (form.support_radius() > grid.r_max()) {
    tail = quad::integrate_log_radius(shell, grid.r_max(), grid.r_max() * 1e8, 1e-10);
  }
  const double mass = total_mass(f);
  if (tail > opts.support_tolerance * mass) throw SupportError(tail / mass);
  out.tail_mass = tail;
  out.total_mass = mass;
  return out;
}

/// sum w for ensembles, \iint f otherwise.
inline double total_mass(const PhaseDensity& f, const PhaseOptions& opts) {
  if (f.is_ensemble()) {
    double m = 0.0;
    for (const auto& c : f.characteristics()) m += c.w;
    return m;
  }
  return phase_integral_or_throw(
      f.analytic(), [](double, double, double v) { return v; }, "mass", 1.0, opts);
}

/// (\iint f^alpha)^(1/alpha). Ensembles support alpha = 1 only.
inline double lp_norm(const PhaseDensity& f, double alpha, const PhaseOptions& opts = {}) {
  if (!(alpha >= 1.0)) throw InvalidArgument("lp_norm needs alpha >= 1");
  if (alpha == 1.0) return total_mass(f, opts);
  if (f.is_ensemble())
    throw UnsupportedRepresentation("L^alpha norm with alpha > 1 of an atomic ensemble");
  const double v = phase_integral_or_throw(
      f.analytic(), [alpha](double, double, double x) { return std::pow(x, alpha); },
      "||f||_" + std::to_string(alpha), alpha, opts);
  return std::pow(v, 1.0 / alpha);
}

/// ||rho_f||_gamma of an analytic form; throws DivergenceError when infinite.
inline double spatial_lp_norm(const PhaseDensity& f, double gamma, const PhaseOptions& opts = {}) {
  if (!(gamma >= 1.0)) throw InvalidArgument("spatial_lp_norm needs gamma >= 1");
  if (f.is_ensemble()) throw UnsupportedRepresentation("L^gamma norm of the density of an atomic ensemble");
  const AnalyticForm& a = f.analytic();
  const int nodes = opts.momentum_nodes;
  auto integrand = [&](double r) {
    return 4.0 * quad::kPi * r * r * std::pow(analytic_density_at(a, r, nodes), gamma);
  };
  const auto res = quad::radial_integral(integrand, phase_rule(a, opts));
  if (res.divergent) throw DivergenceError("||rho||_" + std::to_string(gamma), gamma);
  return std::pow(res.value, 1.0 / gamma);
}

/// sup |p| over the support.
inline double momentum_support(const PhaseDensity& f) {
  if (f.is_ensemble()) {
    double p = 0.0;
    for (const auto& c : f.characteristics()) p = std::max(p, c.momentum());
    return p;
  }
  const auto& a = f.analytic();
  if (a.base == AnalyticForm::Base::Product) return 1.0 / a.lambda;
  if (a.phi.singular_at_origin())
    throw InvalidArgument("momentum support of " + a.phi.label() + " is unbounded");
  double depth = a.phi.central_depth();
  for (int i = -60; i <= 40; ++i) depth = std::max(depth, -a.phi(std::pow(10.0, 0.1 * i)));
  if (!std::isfinite(depth)) throw InvalidArgument("momentum support is unbounded");
  return depth / a.lambda;
}

// ---- ensemble CSV --------------------------------------------------------

inline void write_ensemble_csv(std::ostream& os, const std::vector<Characteristic>& ens) {
  os << "r,p_r,L,w\n";
  char buf[128];
  for (const auto& c : ens) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", c.r, c.p_r, c.L, c.w);
    os << buf;
  }
}

inline std::vector<Characteristic> read_ensemble_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InvalidArgument("empty ensemble CSV");
  if (line.rfind("r,p_r,L,w", 0) != 0) throw InvalidArgument("ensemble CSV header must be r,p_r,L,w");
  std::vector<Characteristic> out;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Characteristic c;
    char comma = 0;
    if (!(ls >> c.r >> comma >> c.p_r >> comma >> c.L >> comma >> c.w))
      throw InvalidArgument("malformed ensemble CSV row " + std::to_string(row));
    out.push_back(c);
  }
  return out;
}

}  // namespace rvp
