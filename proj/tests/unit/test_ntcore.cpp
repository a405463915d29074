#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "resonance/ntcore.hpp"

using namespace resonance;

namespace {

bool prime_by_trial_division(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

}  // namespace

TEST(FactorTable, SmallestPrimeFactorsUpToTen) {
  const FactorTable table(10);
  const std::vector<std::uint32_t> expected = {2, 3, 2, 5, 2, 7, 2, 3, 2};
  for (std::uint64_t n = 2; n <= 10; ++n) EXPECT_EQ(table.spf(n), expected[n - 2]) << n;
}

TEST(FactorTable, LimitTwo) {
  const FactorTable table(2);
  EXPECT_EQ(table.spf(2), 2u);
  EXPECT_TRUE(table.is_prime(2));
}

TEST(FactorTable, LargePrimeNearTenMillion) {
  ASSERT_TRUE(prime_by_trial_division(9'999'991));
  const FactorTable table(10'000'000);
  EXPECT_EQ(table.spf(9'999'991), 9'999'991u);
  EXPECT_EQ(table.spf(9'999'990), 2u);
}

TEST(FactorTable, SpfDividesAndPrimesAreFixedPoints) {
  const FactorTable table(20'000);
  for (std::uint64_t n = 2; n <= 20'000; ++n) {
    const auto p = table.spf(n);
    ASSERT_EQ(n % p, 0u);
    ASSERT_TRUE(prime_by_trial_division(p));
    ASSERT_EQ(table.is_prime(n), prime_by_trial_division(n));
    for (std::uint64_t d = 2; d < p; ++d) ASSERT_NE(n % d, 0u);
  }
}

TEST(FactorTable, FactorizeExamples) {
  const FactorTable table(100);
  EXPECT_EQ(table.factorize(12), (std::vector<PrimePower>{{2, 2}, {3, 1}}));
  EXPECT_TRUE(table.factorize(1).empty());
  EXPECT_EQ(table.factorize(97), (std::vector<PrimePower>{{97, 1}}));
}

TEST(FactorTable, FactorizationRoundTrips) {
  const FactorTable table(100'000);
  for (std::uint64_t n = 1; n <= 100'000; ++n) {
    std::uint64_t product = 1;
    std::uint64_t previous = 0;
    for (const auto& pp : table.factorize(n)) {
      ASSERT_GT(pp.prime, previous);
      previous = pp.prime;
      for (unsigned e = 0; e < pp.exponent; ++e) product *= pp.prime;
    }
    ASSERT_EQ(product, n);
  }
}

TEST(FactorTable, PrimesInWindow) {
  const FactorTable table(100);
  EXPECT_EQ(table.primes_in(59.9, 65.9), (std::vector<std::uint64_t>{61}));
  EXPECT_TRUE(table.primes_in(24, 28).empty());
  EXPECT_EQ(table.primes_in(2, 10), (std::vector<std::uint64_t>{2, 3, 5, 7}));
  EXPECT_TRUE(table.primes_in(50, 40).empty());
  EXPECT_THROW(table.primes_in(2, 101), std::out_of_range);
}

TEST(FactorTable, SquarefreeAndGcd) {
  const FactorTable table(100);
  EXPECT_TRUE(table.is_squarefree(10));
  EXPECT_FALSE(table.is_squarefree(12));
  EXPECT_TRUE(table.is_squarefree(1));
  EXPECT_EQ(resonance::gcd(12, 18), 6u);
  EXPECT_EQ(resonance::gcd(0, 7), 7u);
  EXPECT_THROW(resonance::gcd(0, 0), std::invalid_argument);
}

TEST(FactorTable, Errors) {
  EXPECT_THROW(FactorTable(1), std::invalid_argument);
  EXPECT_THROW(FactorTable(1000, 100), resource_limit_error);
  EXPECT_THROW(FactorTable(std::uint64_t{1} << 33), resource_limit_error);
  const FactorTable table(10);
  EXPECT_THROW(table.spf(11), std::out_of_range);
}

TEST(LogRatio, AccurateForAdjacentIntegers) {
  const double exact = 1.0 / 1'000'000'000'000.0 - 0.5 / 1e24;
  EXPECT_NEAR(log_ratio(1'000'000'000'001ULL, 1'000'000'000'000ULL), exact, 1e-26);
  EXPECT_DOUBLE_EQ(log_ratio(4, 3), std::log(4.0 / 3.0));
}
