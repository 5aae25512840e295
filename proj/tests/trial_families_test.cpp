#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rvp/criticality.hpp"
#include "rvp/trial_families.hpp"

namespace {

using rvp::quad::kPi;

rvp::RadialProfile gaussian(double A, double b) {
  return {"gaussian", [=](double r) { return -A * std::exp(-b * r * r); },
          [=](double r) { return 2.0 * A * b * r * std::exp(-b * r * r); }};
}

rvp::PhaseDensity plummer_trial(double kappa = 1.0) { return rvp::squared_hminus_density(rvp::plummer(kappa)); }

TEST(Plummer, Profile) {
  const rvp::RadialProfile phi = rvp::plummer(1.0);
  EXPECT_EQ(phi(0.0), -1.0);
  EXPECT_EQ(rvp::RadialProfile(rvp::plummer(3.0))(0.0), -3.0);
  EXPECT_NEAR(phi(2.0), -1.0 / std::sqrt(5.0), 1e-16);
  EXPECT_THROW(rvp::plummer(0.0), rvp::InvalidArgument);
  EXPECT_THROW(rvp::plummer(-1.0), rvp::InvalidArgument);
}

TEST(Plummer, NormRatioIsKappaIndependent) {
  const double want = 3.0 * std::cbrt(kPi) / std::pow(4.0, 5.0 / 3.0);
  EXPECT_NEAR(want, 0.43592, 1e-5);
  for (double kappa : {0.25, 1.0, 3.0}) {
    const rvp::RadialProfile phi = rvp::plummer(kappa);
    const double n6 = rvp::profile_norm(phi, 6.0);
    EXPECT_NEAR(std::pow(n6, 4) / rvp::profile_power_integral(phi, 5.0) / want, 1.0, 1e-9);
  }
}

TEST(SquaredDensity, NormFromProfileNorms) {
  for (const auto& phi : {rvp::RadialProfile(rvp::plummer(1.0)), gaussian(0.7, 2.0), gaussian(1.5, 0.4)}) {
    const double n6 = rvp::profile_norm(phi, 6.0);
    const double want = 0.5 * std::cbrt(15.0 / kPi) * std::pow(n6, 4) / rvp::profile_power_integral(phi, 5.0);
    EXPECT_NEAR(rvp::lp_norm(rvp::squared_hminus_density(phi), 1.5) / want, 1.0, 1e-8) << phi.label();
    EXPECT_NEAR(rvp::lp_norm(rvp::squared_hminus_density(phi), 1.0), 1.0, 1e-9);
  }
}

TEST(SquaredDensity, RejectsDivergentFiveNorm) {
  // psi_delta with 5 delta >= 3
  EXPECT_THROW(rvp::squared_hminus_density(rvp::cusp(0.7)), rvp::DivergenceError);
  const rvp::RadialProfile slow("slow", [](double r) { return -1.0 / std::pow(1.0 + r * r, 0.25); });
  EXPECT_THROW(rvp::squared_hminus_density(slow), rvp::DivergenceError);
}

TEST(PowerDensity, ThetaTwoIsSquared) {
  const rvp::RadialProfile phi = rvp::plummer(1.5);
  const auto a = rvp::power_hminus_density(phi, 2.0), b = rvp::squared_hminus_density(phi);
  EXPECT_DOUBLE_EQ(a.analytic().norm, b.analytic().norm);
  EXPECT_NEAR(rvp::power_density_norm(rvp::plummer(1.0), 2.0, 1.5), rvp::kCriticalNorm, 1e-9);
}

TEST(PowerDensity, NormMatchesQuadrature) {
  for (double theta : {1.5, 3.0, 5.0}) {
    for (double beta : {1.3, 1.5, 2.0}) {
      const rvp::RadialProfile phi = rvp::plummer(1.0);
      const double closed = rvp::power_density_norm(phi, theta, beta);
      EXPECT_NEAR(rvp::lp_norm(rvp::power_hminus_density(phi, theta), beta) / closed, 1.0, 1e-8);
    }
  }
}

TEST(PowerDensity, UltraKineticConstant) {
  // E_p^u = b(theta) ||phi||_{theta+4}^{theta+4} / ||phi||_{theta+3}^{theta+3}
  for (double theta : {1.0, 2.0, 3.0, 4.5}) {
    const auto f = rvp::power_hminus_density(rvp::plummer(1.0), theta);
    rvp::PhaseOptions opts;
    const double direct = rvp::phase_integral_or_throw(
        f.analytic(), [](double s, double, double v) { return s * v; }, "E_p^u", 1.0, opts);
    EXPECT_NEAR(rvp::power_density_ultra_energy(rvp::plummer(1.0), theta) / direct, 1.0, 1e-9) << theta;
  }
  EXPECT_NEAR(rvp::power_density_ultra_energy(rvp::plummer(1.0), 2.0), 3.0 * kPi / 32.0, 1e-10);
}

TEST(CuspWindow, Examples) {
  const auto [lo, hi] = rvp::cusp_theta_range(1.3);
  EXPECT_EQ(lo, 2.0);
  EXPECT_NEAR(hi, 6.0, 1e-12);
  const auto w = rvp::cusp_admissible_window(1.3, 3.0);
  EXPECT_NEAR(w.lower, 5.0 / 12.0, 1e-15);
  EXPECT_NEAR(w.upper, 3.0 / 7.0, 1e-15);
  EXPECT_TRUE(w.contains(0.42));
  EXPECT_FALSE(w.contains(3.0 / 7.0));
  EXPECT_TRUE(rvp::cusp_admissible_window(1.3, 2.0).empty());
  EXPECT_TRUE(rvp::cusp_admissible_window(1.3, 6.0).empty());
  EXPECT_THROW(rvp::cusp_admissible_window(1.5, 3.0), rvp::InvalidArgument);
  EXPECT_THROW(rvp::cusp_admissible_window(1.1, 3.0), rvp::InvalidArgument);
  EXPECT_NEAR(rvp::default_cusp_theta(1.3), 10.0 / 3.0, 1e-12);
}

TEST(CuspWindow, NonEmptyExactlyInThetaRange) {
  for (double beta : {1.2, 1.25, 1.3, 1.4, 1.45}) {
    const auto [lo, hi] = rvp::cusp_theta_range(beta);
    for (double theta = 1.0; theta < 12.0; theta += 0.125) {
      const bool inside = theta > lo && theta < hi;
      EXPECT_EQ(!rvp::cusp_admissible_window(beta, theta).empty(), inside) << beta << " " << theta;
    }
  }
}

struct CuspFlags {
  bool beta_finite = false;
  bool critical_divergent = false;
  bool ultra_finite = false;
  bool rho_outside = false;
};

CuspFlags cusp_flags(double beta, double theta, double delta) {
  CuspFlags c;
  const auto f = rvp::power_hminus_density(rvp::cusp(delta), theta);
  try {
    c.beta_finite = std::isfinite(rvp::lp_norm(f, beta));
  } catch (const rvp::DivergenceError&) {
  }
  try {
    rvp::lp_norm(f, 1.5);
  } catch (const rvp::DivergenceError&) {
    c.critical_divergent = true;
  }
  try {
    rvp::PhaseOptions opts;
    c.ultra_finite = std::isfinite(rvp::phase_integral_or_throw(
        f.analytic(), [](double s, double, double v) { return s * v; }, "E_p^u", 1.0, opts));
  } catch (const rvp::DivergenceError&) {
  }
  try {
    rvp::spatial_lp_norm(f, 1.2);
  } catch (const rvp::DivergenceError&) {
    c.rho_outside = true;
  }
  return c;
}

TEST(Cusp, CounterexampleFlags) {
  const auto c = cusp_flags(1.3, 3.0, 0.42);
  EXPECT_TRUE(c.beta_finite);
  EXPECT_TRUE(c.critical_divergent);
  EXPECT_TRUE(c.ultra_finite);
  EXPECT_TRUE(c.rho_outside);
  EXPECT_NEAR(rvp::power_density_ultra_energy(rvp::cusp(0.42), 3.0),
              rvp::energy(rvp::power_hminus_density(rvp::cusp(0.42), 3.0)).ultra, 1e-8);
}

// near the upper edge the finite integrals converge like a tiny power of r
// and are numerically indistinguishable from divergent ones
TEST(Cusp, FlagsAcrossWindow) {
  for (double beta : {1.2, 1.25, 1.3}) {
    const double theta = rvp::default_cusp_theta(beta);
    const auto w = rvp::cusp_admissible_window(beta, theta);
    for (double t : {0.1, 0.3}) {
      const double delta = w.lower + t * (w.upper - w.lower);
      const auto c = cusp_flags(beta, theta, delta);
      EXPECT_TRUE(c.beta_finite && c.critical_divergent && c.ultra_finite && c.rho_outside)
          << beta << " " << theta << " " << delta;
    }
  }
}

TEST(Cusp, OutsideWindowHasFiniteCriticalNorm) {
  // delta below the window: everything finite, rho in L^{6/5}
  const auto f = rvp::power_hminus_density(rvp::cusp(0.2), 3.0);
  EXPECT_NO_THROW(rvp::lp_norm(f, 1.5));
  EXPECT_NO_THROW(rvp::spatial_lp_norm(f, 1.2));
}

TEST(DoubleScale, Identity) {
  const auto f = plummer_trial();
  const auto g = rvp::double_scale(f, 1.0, 1.0);
  EXPECT_EQ(g.kind(), f.kind());
  EXPECT_DOUBLE_EQ(rvp::lp_norm(g, 1.5), rvp::lp_norm(f, 1.5));
  EXPECT_EQ(rvp::double_scale(f, 2.0, 1.0).kind(), rvp::DensityKind::DoubleScaled);
  EXPECT_THROW(rvp::double_scale(f, 0.0, 1.0), rvp::InvalidArgument);
}

TEST(DoubleScale, NormScaling) {
  const auto f = rvp::power_hminus_density(rvp::plummer(1.0), 3.0);
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 5; ++i) {
    const double kappa = 0.3 + 3.0 * U(gen), lambda = 0.3 + 3.0 * U(gen);
    const auto g = rvp::double_scale(f, kappa, lambda);
    for (double beta : {1.0, 1.5, 2.0}) {
      const double want = std::pow(kappa * lambda, 3.0 * (1.0 - 1.0 / beta)) * rvp::lp_norm(f, beta);
      EXPECT_NEAR(rvp::lp_norm(g, beta) / want, 1.0, 1e-9);
    }
  }
  EXPECT_NEAR(rvp::lp_norm(rvp::double_scale(plummer_trial(), 4.0, 0.5), 1.5), 2.0 * rvp::kCriticalNorm, 1e-9);
}

TEST(DoubleScale, UltraEnergyAndDensity) {
  const auto f = plummer_trial();
  rvp::PhaseOptions opts;
  auto ultra = [&](const rvp::PhaseDensity& g) {
    return rvp::phase_integral_or_throw(
        g.analytic(), [](double s, double, double v) { return s * v; }, "E_p^u", 1.0, opts);
  };
  for (double lambda : {0.5, 3.0}) {
    EXPECT_NEAR(ultra(rvp::double_scale(f, 1.0, lambda)), ultra(f) / lambda, 1e-10);
    const auto a = rvp::project_spatial_density(rvp::double_scale(f, 2.0, lambda), rvp::RadialGrid{});
    const auto b = rvp::project_spatial_density(rvp::double_scale(f, 2.0, 1.0), rvp::RadialGrid{});
    for (double r : {0.01, 0.5, 3.0}) EXPECT_NEAR(a.exact(r) / b.exact(r), 1.0, 1e-12);
  }
}

TEST(DoubleScale, EnsembleMap) {
  const rvp::PhaseDensity e({{2.0, 3.0, 4.0, 1.0}});
  const auto g = rvp::double_scale(e, 2.0, 4.0);
  const auto& c = g.characteristics().front();
  EXPECT_DOUBLE_EQ(c.r, 1.0);
  EXPECT_DOUBLE_EQ(c.p_r, 0.75);
  EXPECT_DOUBLE_EQ(c.L, 0.5);
}

TEST(DoubleScale, HyperbolaHasConstantNorm) {
  const auto f = plummer_trial();
  for (double eps : {0.5, 1.0}) {
    for (double kappa : {0.5, 1.0, 3.0}) {
      const auto g = rvp::double_scale(f, kappa, (1.0 + eps) / kappa);
      EXPECT_NEAR(rvp::lp_norm(g, 1.5) / ((1.0 + eps) * rvp::kCriticalNorm), 1.0, 1e-8);
    }
  }
}

TEST(AngularCutoff, RenormalisesAndLowersNorm) {
  const auto f = plummer_trial();
  const auto g = rvp::with_angular_cutoff(f, 0.05);
  EXPECT_NEAR(rvp::lp_norm(g, 1.0), 1.0, 1e-9);
  EXPECT_LT(rvp::lp_norm(g, 1.5), rvp::kCriticalNorm);
  // cutoff given in current coordinates survives a later double scaling
  const auto h = rvp::with_angular_cutoff(rvp::double_scale(f, 2.0, 0.5), 0.05);
  EXPECT_NEAR(rvp::lp_norm(h, 1.5), rvp::lp_norm(g, 1.5), 1e-9);
  EXPECT_THROW(rvp::with_angular_cutoff(f, -1.0), rvp::InvalidArgument);
}

TEST(ProductDensity, Norms) {
  for (double R : {0.5, 1.0, 2.0}) {
    const auto f = rvp::product_density(R);
    EXPECT_NEAR(rvp::lp_norm(f, 1.0), 1.0, 1e-9);
    const double vol = 16.0 * kPi * kPi / 9.0 * R * R * R;
    EXPECT_NEAR(rvp::lp_norm(f, 2.0), 1.0 / std::sqrt(vol), 1e-9);
  }
  // beta < 6/5 counterexample: ||f_R||_beta grows without bound as R -> infinity
  // while ||f_R||_1 stays 1 and E_p stays bounded
  const double a = rvp::lp_norm(rvp::product_density(1.0), 1.1);
  const double b = rvp::lp_norm(rvp::product_density(100.0), 1.1);
  EXPECT_LT(b, a);
}

}  // namespace
