#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "rvp/radial_field.hpp"
#include "rvp/trial_families.hpp"

namespace {

using rvp::quad::kPi;

const double kSobolev = 3.0 * std::pow(kPi / 2.0, 4.0 / 3.0);

rvp::RadialField plummer_field(double kappa = 1.0) {
  return rvp::solve_field(
      rvp::project_spatial_density(rvp::squared_hminus_density(rvp::plummer(kappa)), rvp::RadialGrid{}));
}

// -A (1 + b r^2)^(-q)
rvp::RadialProfile algebraic(double A, double b, double q) {
  return {"algebraic", [=](double r) { return -A * std::pow(1.0 + b * r * r, -q); },
          [=](double r) { return 2.0 * A * q * b * r * std::pow(1.0 + b * r * r, -q - 1.0); }};
}

// -A exp(-b r^2)
rvp::RadialProfile gaussian(double A, double b) {
  return {"gaussian", [=](double r) { return -A * std::exp(-b * r * r); },
          [=](double r) { return 2.0 * A * b * r * std::exp(-b * r * r); }};
}

TEST(EnclosedMass, UniformBall) {
  const rvp::RadialGrid grid(1e-3, 10.0, 1024);
  const auto field = rvp::solve_field(rvp::project_spatial_density(rvp::product_density(1.0), grid));
  EXPECT_NEAR(field.enclosed(0.5), 0.125, 1e-9);
  EXPECT_NEAR(field.enclosed(5.0), 1.0, 1e-9);
}

TEST(EnclosedMass, PlummerAntiderivative) {
  const auto field = plummer_field();
  for (double r : {1e-4, 0.01, 0.2, 1.0, 3.0, 50.0, 900.0}) {
    const double want = r * r * r / std::pow(1.0 + r * r, 1.5);
    // below the first node M is extrapolated as r^3
    EXPECT_NEAR(field.enclosed(r) / want, 1.0, r < field.grid.r_min() ? 1e-5 : 1e-8) << r;
  }
  EXPECT_NEAR(field.total_mass, 1.0, 1e-8);
}

TEST(EnclosedMass, TrapezoidMatchesDepositedMass) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<rvp::Characteristic> ps(400);
  for (auto& c : ps) c = {0.01 + 20.0 * U(gen), 0.0, 0.1, 1.0 / 400.0};
  const auto rho = rvp::project_spatial_density(rvp::PhaseDensity(ps), rvp::RadialGrid{});
  const auto m = rvp::enclosed_mass(rho);
  EXPECT_NEAR(m.back(), 1.0, 1e-8);
  for (std::size_t i = 1; i < m.size(); ++i) EXPECT_GE(m[i], m[i - 1]);
}

TEST(Potential, PlummerIsPhiOne) {
  const auto field = plummer_field();
  for (std::size_t i = 0; i < field.grid.size(); i += 97) {
    const double r = field.grid[i];
    EXPECT_NEAR(field.potential[i], -1.0 / std::sqrt(1.0 + r * r), 1e-9) << r;
  }
  EXPECT_NEAR(field.potential_at(2e3), -1.0 / std::sqrt(1.0 + 4e6), 1e-9);
}

TEST(Potential, InvariantsOnCorpus) {
  const rvp::RadialGrid grid;
  std::vector<rvp::PhaseDensity> corpus{rvp::squared_hminus_density(rvp::plummer(1.0)),
                                        rvp::power_hminus_density(rvp::plummer(3.0), 3.0),
                                        rvp::product_density(2.0)};
  for (const auto& f : corpus) {
    const auto field = rvp::solve_field(rvp::project_spatial_density(f, grid));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      EXPECT_LE(field.potential[i], 0.0);
      if (i) {
        EXPECT_GE(field.mass[i], field.mass[i - 1]);
        EXPECT_GE(field.potential[i], field.potential[i - 1] - 1e-14);
      }
    }
    EXPECT_NEAR(grid.r_max() * field.potential.back(), -1.0, 1e-6);
  }
}

TEST(Potential, ShellTheorem) {
  const rvp::RadialGrid grid(1e-3, 1e3, 8192);
  const auto field = rvp::solve_field(rvp::project_spatial_density(rvp::PhaseDensity({{1.0, 0.0, 1.0, 1.0}}), grid));
  EXPECT_NEAR(field.potential_at(2.0), -0.5, 1e-12);
  EXPECT_NEAR(field.potential_at(0.5), -1.0, 2e-3);
  EXPECT_NEAR(field.potential_at(0.01), -1.0, 2e-3);
  EXPECT_NEAR(rvp::radial_force(field, 0.5), 0.0, 1e-15);
  for (double r : {1.5, 4.0, 100.0}) EXPECT_NEAR(rvp::radial_force(field, r), 1.0 / (r * r), 1e-12 / (r * r));
}

TEST(RadialForce, AtOrigin) {
  EXPECT_EQ(rvp::radial_force(plummer_field(), 0.0), 0.0);
  auto field = plummer_field();
  field.central_mass = 1.0;
  EXPECT_THROW(rvp::radial_force(field, 0.0), rvp::InvalidArgument);
}

TEST(RadialForce, CubicBelowFirstNode) {
  const auto field = plummer_field();
  for (double r : {1e-5, 1e-4, 5e-4}) EXPECT_NEAR(rvp::radial_force(field, r) / r, 1.0, 1e-5);
}

TEST(Dirichlet, PlummerValue) {
  EXPECT_NEAR(rvp::dirichlet_energy(plummer_field()) / (3.0 * kPi * kPi / 4.0), 1.0, 1e-6);
  EXPECT_NEAR(rvp::dirichlet_energy(rvp::RadialProfile(rvp::plummer(1.0))) / (3.0 * kPi * kPi / 4.0), 1.0, 1e-10);
}

TEST(Dirichlet, ScalesWithKappa) {
  const double d1 = rvp::dirichlet_energy(rvp::RadialProfile(rvp::plummer(1.0)));
  for (double kappa : {0.5, 2.0})
    EXPECT_NEAR(rvp::dirichlet_energy(rvp::RadialProfile(rvp::plummer(kappa))) / (kappa * d1), 1.0, 1e-8);
}

TEST(Sobolev, EqualityForPlummer) {
  for (double kappa : {0.5, 1.0, 2.0}) {
    const rvp::RadialProfile phi = rvp::plummer(kappa);
    const double d = rvp::dirichlet_energy(phi);
    const double n6 = rvp::profile_norm(phi, 6.0);
    EXPECT_NEAR((d - kSobolev * n6 * n6) / d, 0.0, 1e-8) << kappa;
  }
}

TEST(Sobolev, StrictDeficitForOtherProfiles) {
  std::mt19937_64 gen(2718);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const double A = 0.2 + 2.0 * U(gen), b = 0.2 + 4.0 * U(gen);
    const rvp::RadialProfile phi = (i % 2) ? gaussian(A, b) : algebraic(A, b, 0.75 + 1.5 * U(gen));
    const double d = rvp::dirichlet_energy(phi);
    const double n6 = rvp::profile_norm(phi, 6.0);
    EXPECT_GT((d - kSobolev * n6 * n6) / d, 1e-4) << i;
  }
}

TEST(Poisson, FiniteDifferenceLaplacian) {
  // (1/r^2) d/dr (r^2 dphi/dr) = 4 pi rho on interior nodes
  for (const auto& f : {rvp::squared_hminus_density(rvp::plummer(1.0)),
                        rvp::power_hminus_density(rvp::plummer(0.7), 3.0)}) {
    const rvp::RadialGrid grid(1e-2, 1e2, 4096);
    const auto field = rvp::solve_field(rvp::project_spatial_density(f, rvp::RadialGrid{}));
    const auto rho = rvp::project_spatial_density(f, rvp::RadialGrid{});
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); i += 64) {
      const double r = grid[i], h = 1e-3 * r;
      auto flux = [&](double s) {
        const double dphi = (field.potential_at(s + 0.5 * h) - field.potential_at(s - 0.5 * h)) / h;
        return s * s * dphi;
      };
      const double lap = (flux(r + 0.5 * h) - flux(r - 0.5 * h)) / (h * r * r);
      const double want = 4.0 * kPi * rho.exact(r);
      worst = std::max(worst, std::abs(lap - want) / std::max(want, 1e-3 * 4.0 * kPi * rho.exact(0.0)));
    }
    EXPECT_LT(worst, 5e-3);
  }
}

TEST(Poisson, FiniteDifferenceConverges) {
  // second order: halving the step cuts the residual by ~4
  const auto f = rvp::squared_hminus_density(rvp::plummer(1.0));
  const auto field = rvp::solve_field(rvp::project_spatial_density(f, rvp::RadialGrid{}));
  auto phi = [](double r) { return -1.0 / std::sqrt(1.0 + r * r); };
  auto resid = [&](auto&& pot, double h) {
    const double r = 0.7;
    const double lap = (pot(r + h) - 2.0 * pot(r) + pot(r - h)) / (h * h) + (pot(r + h) - pot(r - h)) / (h * r);
    return std::abs(lap - 3.0 * std::pow(1.0 + r * r, -2.5));
  };
  const double e1 = resid(phi, 0.02), e2 = resid(phi, 0.01);
  EXPECT_NEAR(e1 / e2, 4.0, 0.2);
  EXPECT_LT(resid([&](double r) { return field.potential_at(r); }, 0.01), 5e-3);
}

TEST(Potential, ScalingCovariance) {
  const auto f1 = plummer_field(1.0);
  for (double kappa : {0.5, 2.0}) {
    const auto fk = plummer_field(kappa);
    for (double r : {0.01, 0.3, 2.0, 30.0}) EXPECT_NEAR(fk.potential_at(r), kappa * f1.potential_at(kappa * r), 1e-8);
  }
}

TEST(FieldCsv, Header) {
  std::ostringstream os;
  rvp::write_field_csv(os, plummer_field());
  EXPECT_EQ(os.str().substr(0, 14), "r,M,phi,force\n");
}

}  // namespace
