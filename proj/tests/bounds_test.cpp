#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "rvp/bounds.hpp"
#include "rvp/radial_field.hpp"
#include "rvp/trial_families.hpp"

namespace {

using rvp::quad::kPi;

std::vector<rvp::PhaseDensity> corpus() {
  const auto plummer = rvp::squared_hminus_density(rvp::plummer(1.0));
  return {plummer, rvp::power_hminus_density(rvp::plummer(2.0), 3.0), rvp::product_density(1.5),
          rvp::with_angular_cutoff(plummer, 0.05), rvp::double_scale(plummer, 2.0, 0.3)};
}

TEST(DensityExponents, Examples) {
  const auto a = rvp::density_exponents(1.5);
  EXPECT_NEAR(a.gamma, 1.2, 1e-15);
  EXPECT_NEAR(a.eta, 0.5, 1e-15);
  const auto b = rvp::density_exponents(INFINITY);
  EXPECT_EQ(b.gamma, 4.0 / 3.0);
  EXPECT_EQ(b.eta, 0.25);
  const auto c = rvp::density_exponents(1.0);
  EXPECT_NEAR(c.gamma, 1.0, 1e-15);
  EXPECT_NEAR(c.eta, 1.0, 1e-15);
  EXPECT_THROW(rvp::density_exponents(0.5), rvp::InvalidArgument);
}

TEST(DensityExponents, HolderBalance) {
  // gamma eta / alpha + gamma (1 - eta) = 1
  for (double alpha : {1.0, 1.5, 2.0, 6.0, 40.0}) {
    const auto e = rvp::density_exponents(alpha);
    EXPECT_NEAR(e.gamma * e.eta / alpha + e.gamma * (1.0 - e.eta), 1.0, 1e-14) << alpha;
  }
}

TEST(DensityConstant, SplitOptimum) {
  // min_P A P^e + B / P by brute force against the closed form
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> U(0.1, 3.0);
  for (double alpha : {1.5, 2.0, 6.0, double(INFINITY)}) {
    const double inv_conj = std::isinf(alpha) ? 1.0 : 1.0 - 1.0 / alpha;
    const double e = 3.0 * inv_conj;
    const double eta = 1.0 / (1.0 + e);
    const double F = U(gen), B = U(gen);
    const double A = std::pow(4.0 * kPi / 3.0, inv_conj) * F;
    double best = INFINITY;
    for (double lp = -6.0; lp <= 6.0; lp += 1e-5) {
      const double P = std::exp(lp);
      best = std::min(best, A * std::pow(P, e) + B / P);
    }
    const double closed = rvp::density_bound_constant(alpha) * std::pow(F, eta) * std::pow(B, 1.0 - eta);
    EXPECT_NEAR(best / closed, 1.0, 1e-8) << alpha;
  }
  EXPECT_EQ(rvp::density_bound_constant(1.0), 1.0);
  EXPECT_NEAR(rvp::density_bound_constant(1e9), rvp::density_bound_constant(INFINITY), 1e-7);
}

TEST(DensityConstant, InequalityOnCorpus) {
  for (double alpha : {2.0, 6.0}) {
    const auto ex = rvp::density_exponents(alpha);
    for (const auto& f : corpus()) {
      const double lhs = rvp::spatial_lp_norm(f, ex.gamma);
      const double rhs = rvp::density_bound_constant(alpha) * std::pow(rvp::lp_norm(f, alpha), ex.eta) *
                         std::pow(rvp::energy(f).kinetic, 1.0 - ex.eta);
      EXPECT_LE(lhs, rhs);
    }
  }
}

TEST(ForceExponents, AlphaSix) {
  const double gamma = rvp::density_exponents(6.0).gamma;
  EXPECT_NEAR(gamma, 21.0 / 16.0, 1e-15);
  const auto f = rvp::force_exponents(6.0, gamma);
  EXPECT_NEAR(f.theta, 0.72, 1e-14);
  EXPECT_NEAR(f.xi, 1.8, 1e-14);
  EXPECT_THROW(rvp::force_exponents(3.0, gamma), rvp::InvalidArgument);
  EXPECT_THROW(rvp::force_exponents(6.0, 3.0), rvp::InvalidArgument);
}

TEST(ForceConstant, PointwiseOnCorpus) {
  for (double alpha : {4.0, 6.0, 10.0}) {
    const double gamma = rvp::density_exponents(alpha).gamma;
    const auto ex = rvp::force_exponents(alpha, gamma);
    for (const auto& f : corpus()) {
      const auto field = rvp::solve_field(rvp::project_spatial_density(f, rvp::RadialGrid{}));
      double worst = 0.0;
      for (std::size_t i = 0; i < field.grid.size(); ++i) worst = std::max(worst, rvp::radial_force(field, field.grid[i]));
      const double rhs = rvp::force_bound_constant(alpha, gamma) * std::pow(rvp::lp_norm(f, alpha), ex.theta) *
                         std::pow(rvp::spatial_lp_norm(f, gamma), 1.0 - ex.theta) *
                         std::pow(rvp::momentum_support(f), ex.xi);
      EXPECT_LE(worst, rhs) << alpha;
    }
  }
}

TEST(Bootstrap, Examples) {
  EXPECT_NEAR(rvp::solve_support_bootstrap(0.0, 0.0, 1.8), 1.0, 1e-15);
  EXPECT_NEAR(rvp::solve_support_bootstrap(2.0, 0.0, 1.8), 2.0 + std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(rvp::solve_support_bootstrap(0.0, 1.0, 1.0), 0.5 * (3.0 + std::sqrt(5.0)), 1e-13);
  EXPECT_THROW(rvp::solve_support_bootstrap(0.0, 1.0, 2.0), rvp::InvalidArgument);
  EXPECT_THROW(rvp::solve_support_bootstrap(0.0, -1.0, 1.0), rvp::InvalidArgument);
}

TEST(Bootstrap, RootProperty) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const double p0 = 3.0 * U(gen), c = 10.0 * U(gen), xi = 1.95 * U(gen);
    const double x = rvp::solve_support_bootstrap(p0, c, xi);
    const double a = p0 + std::sqrt(1.0 + p0 * p0);
    EXPECT_NEAR(a + std::sqrt(c) * std::pow(x, 0.5 * xi), x, 1e-12 * x);
    // largest root: g < 0 beyond it
    EXPECT_LT(a + std::sqrt(c) * std::pow(1.01 * x, 0.5 * xi), 1.01 * x);
  }
}

TEST(SourceNorms, PlummerTrial) {
  const auto n = rvp::source_norms(rvp::squared_hminus_density(rvp::plummer(1.0)));
  EXPECT_NEAR(n.norm_3_2, rvp::kCriticalNorm, 1e-8);
  EXPECT_NEAR(n.support, 1.0, 1e-15);
  EXPECT_NEAR(n.energy, 0.75968, 1e-5);
  // critical: no varkappa, so no bounds
  EXPECT_THROW(n.density_bound(), rvp::InvalidArgument);
}

TEST(SupportBound, SubcriticalDatum) {
  const auto base = rvp::squared_hminus_density(rvp::plummer(1.0));
  const auto f = rvp::double_scale(base, 0.5, 1.0);
  auto n = rvp::source_norms(f);
  EXPECT_LT(n.norm_3_2, rvp::kCriticalNorm);
  const double p = rvp::predict_support_bound(n);
  EXPECT_GE(p, n.support + std::sqrt(1.0 + n.support * n.support));
  n.alpha = 3.0;
  EXPECT_THROW(rvp::predict_support_bound(n), rvp::InvalidArgument);
}

}  // namespace
