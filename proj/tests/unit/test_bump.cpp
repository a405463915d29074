#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

#include "resonance/bump.hpp"

using namespace resonance;

namespace {

// Direct composite Simpson of int Phi(x) exp(-i xi x) dx over [1/2, 1], no folding.
std::complex<double> hat_by_simpson(double xi, int panels = 200'000) {
  const double a = 0.5;
  const double h = 0.5 / panels;
  std::complex<double> acc = 0.0;
  for (int i = 0; i <= panels; ++i) {
    const double x = a + h * i;
    const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    acc += w * Bump::phi(x) * std::polar(1.0, -xi * x);
  }
  return acc * h / 3.0;
}

}  // namespace

TEST(Bump, ProfileValues) {
  EXPECT_EQ(Bump::phi(0.75), 1.0);
  EXPECT_EQ(Bump::phi(0.25), 0.0);
  EXPECT_NEAR(Bump::phi(0.5625), 0.5, 1e-15);
  EXPECT_EQ(Bump::phi(0.5), 0.0);
  EXPECT_EQ(Bump::phi(1.0), 0.0);
  EXPECT_EQ(Bump::phi(0.625), 1.0);
  EXPECT_EQ(Bump::phi(0.875), 1.0);
  for (int i = 0; i <= 1000; ++i) {
    const double y = 0.4 + 0.7 * i / 1000.0;
    const double v = Bump::phi(y);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_NEAR(v, Bump::phi(1.5 - y), 1e-15);
  }
}

TEST(Bump, TransformAtZero) {
  const Bump bump;
  EXPECT_NEAR(bump.hat_at_zero(), 0.375, 1e-13);
  EXPECT_GE(bump.hat_at_zero(), 0.25);
  EXPECT_LE(bump.hat_at_zero(), 0.5);
  EXPECT_NEAR(std::abs(hat_by_simpson(0.0) - 0.375), 0.0, 1e-12);
}

TEST(Bump, TransformMatchesDirectQuadrature) {
  const Bump bump;
  for (const double xi : {-40.0, -3.0, 0.5, 1.0, 7.25, 25.0, 100.0, 400.0}) {
    const auto expected = hat_by_simpson(xi);
    EXPECT_LT(std::abs(bump.hat(xi) - expected), 1e-11) << xi;
  }
}

TEST(Bump, TransformBoundedByValueAtZero) {
  const Bump bump;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-5000.0, 5000.0);
  for (int i = 0; i < 500; ++i) {
    const double xi = dist(rng);
    EXPECT_LE(bump.hat_abs(xi), bump.hat_at_zero() + 1e-15) << xi;
  }
}

TEST(Bump, ToleranceHalvingConverges) {
  const Bump bump;
  for (const double xi : {3.0, 60.0, 2000.0}) {
    const auto coarse = bump.amplitude_with_error(xi, 1e-6);
    const auto fine = bump.amplitude_with_error(xi, 5e-7);
    const auto reference = bump.amplitude_with_error(xi, 1e-14);
    EXPECT_LE(std::abs(coarse.value - reference.value), 1e-6) << xi;
    EXPECT_LE(std::abs(fine.value - reference.value), 5e-7) << xi;
    EXPECT_LE(fine.error, 5e-7);
  }
}

TEST(Bump, DecayConstant) {
  const Bump bump;
  const auto grid = log_grid(10.0, 1e4, 801);
  EXPECT_LE(bump.decay_constant(0, grid), bump.hat_at_zero());
  const double c3 = bump.decay_constant(3, grid);
  EXPECT_TRUE(std::isfinite(c3));
  EXPECT_GT(c3, 0.0);
  for (const double xi : grid) EXPECT_LE(bump.hat_abs(xi), c3 * std::pow(xi, -3.0) * (1 + 1e-12));
  EXPECT_THROW(bump.decay_constant(3, std::vector<double>{0.5}), std::invalid_argument);
}

TEST(Bump, MemoizationReturnsSameValue) {
  const Bump bump;
  const double first = bump.amplitude(123.456);
  const std::size_t cached = bump.cached_values();
  EXPECT_EQ(bump.amplitude(-123.456), first);
  EXPECT_EQ(bump.cached_values(), cached);
}

TEST(Bump, LogGrid) {
  const auto grid = log_grid(1.0, 1e4, 5);
  ASSERT_EQ(grid.size(), 5u);
  EXPECT_NEAR(grid[1], 10.0, 1e-12);
  EXPECT_EQ(grid.back(), 1e4);
  EXPECT_EQ(default_decay_grid().size(), 2001u);
}
