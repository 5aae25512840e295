#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "rvp/radial_field.hpp"
#include "rvp/sampling.hpp"
#include "rvp/trial_families.hpp"

namespace {

rvp::PhaseDensity cut_plummer() {
  return rvp::with_angular_cutoff(rvp::squared_hminus_density(rvp::plummer(1.0)), 0.05);
}

TEST(Uniform, RangeAndPermutation) {
  rvp::UniformSource u(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.next();
    EXPECT_GE(x, 0.0);
    EXPECT_LT(x, 1.0);
  }
  auto p = u.permutation(100);
  std::sort(p.begin(), p.end());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], i);
}

TEST(Sampling, Deterministic) {
  const auto f = cut_plummer();
  const auto a = rvp::sample_characteristics(f, 500, 42);
  const auto b = rvp::sample_characteristics(f, 500, 42);
  const auto c = rvp::sample_characteristics(f, 500, 43);
  ASSERT_EQ(a.size(), 500u);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].r, b[i].r);
    EXPECT_EQ(a[i].p_r, b[i].p_r);
    EXPECT_EQ(a[i].L, b[i].L);
    differs = differs || a[i].r != c[i].r;
  }
  EXPECT_TRUE(differs);
}

TEST(Sampling, WeightsAndCutoff) {
  for (const auto& f : {cut_plummer(), rvp::double_scale(cut_plummer(), 2.0, 0.5)}) {
    const auto& a = f.analytic();
    const auto ens = rvp::sample_characteristics(f, 2000, 7);
    double mass = 0.0;
    for (const auto& c : ens) {
      mass += c.w;
      EXPECT_GE(c.L, a.angular_cutoff / (a.kappa * a.lambda) * (1.0 - 1e-12));
      EXPECT_GT(c.r, 0.0);
      EXPECT_LE(std::hypot(c.p_r, c.L / c.r), rvp::momentum_support(f) * (1.0 + 1e-9));
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

TEST(Sampling, NeedsCutoff) {
  EXPECT_THROW(rvp::sample_characteristics(rvp::squared_hminus_density(rvp::plummer(1.0)), 10, 1),
               rvp::InvalidArgument);
  EXPECT_THROW(rvp::sample_characteristics(cut_plummer(), 0, 1), rvp::InvalidArgument);
}

TEST(Sampling, RadialMarginal) {
  const auto f = cut_plummer();
  const auto field = rvp::solve_field(rvp::project_spatial_density(f, rvp::RadialGrid{}));
  const auto ens = rvp::sample_characteristics(f, 10000, 11);
  for (double r : {0.3, 1.0, 3.0}) {
    double inside = 0.0;
    for (const auto& c : ens)
      if (c.r < r) inside += c.w;
    // stratified in r, so far tighter than 1/sqrt(N)
    EXPECT_NEAR(inside, field.enclosed(r), 1e-3) << r;
  }
}

TEST(Sampling, EnergyMatchesAnalytic) {
  const auto f = cut_plummer();
  const auto e = rvp::energy(f);
  const auto ens = rvp::sample_characteristics(f, 10000, 5);
  const auto s = rvp::energy(rvp::PhaseDensity(ens));
  EXPECT_NEAR(s.kinetic, e.kinetic, 2e-3);
  EXPECT_NEAR(s.ultra, e.ultra, 2e-3);
  EXPECT_NEAR(s.potential, e.potential, 5e-3);
}

}  // namespace
