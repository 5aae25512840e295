#include <cmath>

#include <gtest/gtest.h>

#include "rvp/grid.hpp"
#include "rvp/phase_space.hpp"
#include "rvp/quadrature.hpp"
#include "rvp/radial_field.hpp"
#include "rvp/radial_profile.hpp"

namespace {

using rvp::quad::kPi;

TEST(GaussLegendre, IntegratesPolynomialsExactly) {
  const auto& rule = rvp::quad::gauss_legendre(8);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * std::pow(rule.nodes[i], 15);
  EXPECT_NEAR(s, 1.0 / 16.0, 1e-15);
}

TEST(GaussLegendre, SingleNodeIsMidpoint) {
  const auto rule = rvp::quad::make_gauss_legendre(1);
  EXPECT_NEAR(rule.nodes[0], 0.5, 1e-15);
  EXPECT_NEAR(rule.weights[0], 1.0, 1e-15);
}

TEST(RadialIntegral, ConvergentPowerLawTail) {
  // \int_0^\infty r^2 / (1+r^2)^3 dr = pi/16
  auto f = [](double r) { return r * r / std::pow(1.0 + r * r, 3); };
  const auto res = rvp::quad::radial_integral(f);
  EXPECT_FALSE(res.divergent);
  EXPECT_NEAR(res.value, kPi / 16.0, 1e-12);
}

TEST(RadialIntegral, LogarithmicDivergenceIsDetected) {
  auto f = [](double r) { return 1.0 / (1.0 + r); };
  EXPECT_TRUE(rvp::quad::radial_integral(f).divergent);
}

TEST(RadialIntegral, CentralPowerDivergenceIsDetected) {
  auto f = [](double r) { return std::exp(-r) * std::pow(r, -1.05); };
  EXPECT_TRUE(rvp::quad::radial_integral(f).divergent);
  auto g = [](double r) { return std::exp(-r) * std::pow(r, -0.9); };
  EXPECT_FALSE(rvp::quad::radial_integral(g).divergent);
}

TEST(Grid, ControlVolumesMatchTrapezoid) {
  rvp::RadialGrid g(1e-3, 1e3, 257);
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g.control_volume(i);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = 4.0 * kPi * std::pow(g[i], 3);
  EXPECT_NEAR(s, rvp::quad::cumulative_trapezoid(v, g.log_step()).back(), 1e-9 * s);
  EXPECT_EQ(g.interval(g[10]), 10u);
  EXPECT_EQ(g.interval(1e9), g.size() - 2);
}

}  // namespace
