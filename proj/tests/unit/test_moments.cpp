#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "resonance/moments.hpp"
#include "resonance/oracle.hpp"
#include "resonance/report.hpp"

using namespace resonance;

namespace {

const FactorTable& table() {
  static const FactorTable t(100'000);
  return t;
}

const Bump& bump() {
  static const Bump b;
  return b;
}

constexpr double kR61 = 0.241083466830523402754422478185;
constexpr double kT61 = 0.227841062231190731624957275299;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SupportSet single_prime_support() { return Resonator::from_log_length(20.0, table()).support(100); }

SupportSet empty_support() { return Resonator::from_log_length(10.0, table()).support(1e6); }

}  // namespace

TEST(FirstMoment, EmptySupportIsIntegralOfBump) {
  const auto f = steinhaus_sample(1, 100'000);
  const double T = 1000.0;
  EXPECT_LT(rel(m1_quadrature(f, T, empty_support()), T * 0.375), 1e-9);
  EXPECT_LT(rel(m1_exact(f, T, empty_support(), bump()), T * 0.375), 1e-12);
  EXPECT_LT(rel(m1_main(T, empty_support(), bump()), T * 0.375), 1e-12);
}

TEST(FirstMoment, SinglePrimeSupport) {
  const auto support = single_prime_support();
  const double T = 1e4;
  const auto f = steinhaus_sample(3, 100'000);
  const double exact = m1_exact(f, T, support, bump());
  const double quad = m1_quadrature(f, T, support);
  EXPECT_GE(quad, 0.0);
  EXPECT_LT(rel(quad, exact), 1e-6);
  EXPECT_LT(rel(m1_main(T, support, bump()), T * 0.375 * (1 + kR61 * kR61)), 1e-12);
}

TEST(FirstMoment, OffDiagonalPartBoundedByTransform) {
  const auto res = Resonator::from_log_length(22.0, table());
  const auto support = res.support(1e9);
  const double T = 300.0;
  const auto f = steinhaus_sample(8, 100'000);
  const double exact = m1_exact(f, T, support, bump());
  const double main = m1_main(T, support, bump());
  double bound = 0.0;
  for (const auto& a : support) {
    for (const auto& b : support) {
      if (a.n != b.n) bound += a.r * b.r * bump().hat_abs(T * std::log(double(a.n) / double(b.n)));
    }
  }
  EXPECT_LE(std::abs(exact - main), T * bound * (1 + 1e-9) + 1e-9);
  // independent of f
  EXPECT_EQ(m1_main(T, support, bump()), main);
}

TEST(SecondMoment, LengthOneReducesToFirstMoment) {
  const auto res = Resonator::from_log_length(22.0, table());
  const auto support = res.support(1e9);
  const auto f = steinhaus_sample(4, 100'000);
  const double T = 500.0;
  EXPECT_LT(rel(m2_exact(f, 1, T, support, table(), bump()), m1_exact(f, T, support, bump())), 1e-12);
  EXPECT_LT(rel(m2_quadrature(f, 1, T, support, table()), m1_quadrature(f, T, support)), 1e-7);
}

TEST(SecondMoment, QuadratureMatchesExactOnTinyCase) {
  const auto support = single_prime_support();
  const auto f = steinhaus_sample(5, 100'000);
  const double T = 1e4;
  const double exact = m2_exact(f, 3, T, support, table(), bump());
  const double quad = m2_quadrature(f, 3, T, support, table());
  EXPECT_LT(rel(quad, exact), 1e-6);
  EXPECT_LE(quad, 3.0 * m1_quadrature(f, T, support) * (1 + 1e-8));
}

TEST(SecondMoment, DiagonalTermIsFreeOfF) {
  // With T large against N X the off-diagonal terms are negligible; every f
  // must give the same diagonal contribution.
  const auto support = single_prime_support();
  const double T = 1e4;
  const std::uint64_t N = 2;
  const double diag = (T / N) * bump().hat_at_zero() * diagonal_sum(coefficients_of(support), N, 100.0);
  for (const auto& f : {UnimodularCMF::constant_one(), archimedean_cmf(2.0), steinhaus_sample(1, 1000),
                        steinhaus_sample(2, 1000)}) {
    EXPECT_LT(rel(m2_exact(f, N, T, support, table(), bump()), diag), 1e-6);
  }
}

TEST(DiagonalSum, Examples) {
  const auto support = Resonator::from_log_length(22.0, table()).support(1e9);
  const auto coeffs = coefficients_of(support);
  double sum_r2 = 0.0;
  for (const auto& e : support) sum_r2 += e.r * e.r;
  EXPECT_LT(rel(diagonal_sum(coeffs, 1, 1e9), sum_r2), 1e-15);

  oracle::ToyResonator toy;
  toy.values = {{1, 1.0}, {2, 1.0}};
  EXPECT_EQ(diagonal_sum(toy.coefficients(), 2, 2.0), 6.0);
  EXPECT_EQ(paper_diagonal_lower_bound(toy.coefficients(), 2, 2.0), 6.0);
  EXPECT_THROW(diagonal_sum(coeffs, 1, 1e9, 10), resource_limit_error);
}

TEST(DiagonalSum, AgreesWithBruteForce) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> value(0.05, 1.5);
  const std::vector<std::uint64_t> primes = {2, 3, 5, 7, 11, 13};
  for (int trial = 0; trial < 10; ++trial) {
    std::map<std::uint64_t, double> at_prime;
    for (const auto p : primes) {
      if (rng() % 2) at_prime[p] = value(rng);
    }
    oracle::ToyResonator toy;
    for (std::uint64_t n = 1; n <= 40; ++n) {
      double r = 1.0;
      for (const auto& pp : table().factorize(n)) {
        if (pp.exponent > 1 || !at_prime.count(pp.prime)) r = 0.0;
        else r *= at_prime[pp.prime];
      }
      if (r > 0.0) toy.values[n] = r;
    }
    for (const std::uint64_t N : {1, 2, 7, 20}) {
      for (const std::uint64_t X : {1, 6, 15, 30}) {
        const double brute = oracle::diagonal_sum_bruteforce(toy, N, X);
        const double fast = diagonal_sum(toy.coefficients(), N, static_cast<double>(X));
        EXPECT_LE(std::abs(fast - brute), 1e-12 * brute) << N << " " << X;
        EXPECT_LE(paper_diagonal_lower_bound(toy.coefficients(), N, static_cast<double>(X)), fast * (1 + 1e-12));
      }
    }
  }
}

TEST(DiagonalLowerBound, LengthOne) {
  const auto support = Resonator::from_log_length(22.0, table()).support(1e9);
  double sum_r2 = 0.0;
  for (const auto& e : support) sum_r2 += e.r * e.r;
  EXPECT_LT(rel(paper_diagonal_lower_bound(coefficients_of(support), 1, 1e9), sum_r2), 1e-15);
}

TEST(OffDiagonal, MinimalGaps) {
  EXPECT_NEAR(min_offdiag_gap(2, 2), std::log(2.0), 1e-15);
  EXPECT_NEAR(min_offdiag_gap(3, 2), std::log(4.0 / 3.0), 1e-15);
  for (std::uint64_t N = 1; N <= 12; ++N) {
    for (std::uint64_t X = 1; X <= 12; ++X) {
      if (N * X == 1) continue;
      EXPECT_GE(min_offdiag_gap(N, X), 1.0 / double(N * X));
    }
  }
  EXPECT_TRUE(std::isinf(min_offdiag_gap(1, 1)));
}

TEST(OffDiagonal, BoundCoversExactOffDiagonalPart) {
  const auto support = Resonator::from_log_length(22.0, table()).support(100);
  double sum_r = 0.0;
  double sum_r2 = 0.0;
  for (const auto& e : support) {
    sum_r += e.r;
    sum_r2 += e.r * e.r;
  }
  const auto grid = default_decay_grid();
  const std::uint64_t N = 6;
  const double X = 100;
  for (const double T : {1e2, 1e3, 1e4}) {
    const auto od = offdiag_bound(sum_r, sum_r2, N, X, T, 0.5, 3, bump(), grid);
    const auto f = steinhaus_sample(2, 1000);
    const double m2 = m2_exact(f, N, T, support, table(), bump());
    const double diag = (T / N) * bump().hat_at_zero() * diagonal_sum(coefficients_of(support), N, X);
    EXPECT_LE(std::abs(m2 - diag), od.m2_bound * (1 + 1e-9)) << T;
    const double m1 = m1_exact(f, T, support, bump());
    EXPECT_LE(std::abs(m1 - m1_main(T, support, bump())), od.m1_bound * (1 + 1e-9) + 1e-9) << T;
    EXPECT_NEAR(od.xi_min, T / (N * X), 1e-9 * od.xi_min);
    EXPECT_NEAR(od.xi_floor, std::pow(T, 0.5 / 6.0), 1e-9);
  }
}

TEST(MainTerm, Examples) {
  const auto res = Resonator::from_log_length(20.0, table());
  EXPECT_NEAR(hough_main_term(res, res.support(1.5)), 1.0, 1e-15);
  EXPECT_NEAR(hough_main_term(res, res.support(61)), 1.00012246227478161286, 1e-14);
  EXPECT_NEAR(hough_main_term(res, res.support(61)), 1 + 2 * kT61 * 61 / (61.0 * 61 * 61), 1e-15);
  const auto wide = Resonator::from_log_length(40.0, table());
  EXPECT_GE(hough_main_term(wide, wide.support(1e5)), 1.0);
}

TEST(RankinError, Examples) {
  const auto empty = Resonator::from_log_length(10.0, table());
  EXPECT_NEAR(rankin_error_term(empty, empty.support(100), 0.1), std::exp(-0.1 * 10.0), 1e-15);
  const auto res = Resonator::from_log_length(20.0, table());
  const double e = rankin_error_term(res, res.support(61), 0.05);
  EXPECT_NEAR(e, 0.398852000098015817866797036853, 1e-13);
  EXPECT_GT(e, 0.0);
  EXPECT_THROW(rankin_error_term(res, res.support(61), 0.7), std::invalid_argument);
}

TEST(RankinTail, Examples) {
  const auto res = Resonator::from_log_length(20.0, table());
  const auto check = rankin_tail_identity_check(res, std::vector<std::uint64_t>{}, 1.0, 0.05);
  EXPECT_NEAR(check.exact_tail, kR61 * kR61, 1e-15);
  EXPECT_NEAR(check.rankin_bound, 1.07138407691503040489, 1e-14);
  EXPECT_TRUE(check.holds);
  const auto beyond = rankin_tail_identity_check(res, std::vector<std::uint64_t>{}, 61.0, 0.05);
  EXPECT_EQ(beyond.exact_tail, 0.0);
  EXPECT_TRUE(beyond.holds);
}

TEST(RankinTail, RandomDraws) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> log_x(20.0, 40.0);
  std::uniform_real_distribution<double> alpha(0.01, 0.49);
  std::uniform_real_distribution<double> log_cap(0.0, 25.0);
  for (int i = 0; i < 100; ++i) {
    const auto res = Resonator::from_log_length(log_x(rng), table());
    const std::uint64_t k = 1 + rng() % 5000;
    const auto check = rankin_tail_identity_check(res, k, std::exp(log_cap(rng)), alpha(rng), table());
    EXPECT_TRUE(check.holds) << i;
  }
}

TEST(Lemma45, Examples) {
  const auto empty = Resonator::from_log_length(10.0, table());
  const auto small = lemma45_check(empty, 3.0);
  EXPECT_EQ(small.lhs, 1.0);
  EXPECT_NEAR(small.rhs, 1.0 / std::log(3.0), 1e-15);
  EXPECT_LT(small.rhs, small.lhs);
  const auto res = Resonator::from_log_length(20.0, table());
  const auto check = lemma45_check(res, 61.0);
  EXPECT_NEAR(check.lhs, 1.00012246227478161286, 1e-14);
  EXPECT_NEAR(check.rhs, 0.257656926839526963237568070392, 1e-14);
  EXPECT_GE(check.lhs, check.rhs);
}

TEST(RatioAndBounds, LengthOneReport) {
  MomentReport r;
  r.N = 1;
  r.T = 1.0;
  r.log_T = 0.0;
  r.sum_r_squared = 1.0;
  r.diag_sum = 1.0;
  r.phi_hat0 = 0.375;
  r.m1_main = 0.375;
  const auto out = ratio_and_bounds(r);
  EXPECT_EQ(out.ratio, 1.0);
  EXPECT_EQ(out.lower_bound, 1.0);
}

TEST(RatioAndBounds, TheoremBoundAtLogTHundred) {
  MomentReport r;
  r.N = 1000;
  r.log_T = 100.0;
  r.T = std::exp(100.0);
  r.delta = 0.5;
  r.sum_r_squared = 2.0;
  r.diag_sum = 2600.0;
  r.m1_main = r.T * 0.375 * 2.0;
  r.phi_hat0 = 0.375;
  const auto out = ratio_and_bounds(r);
  ASSERT_TRUE(out.theorem_bound.has_value());
  EXPECT_NEAR(*out.theorem_bound, std::exp(std::sqrt(50.0 / std::log(100.0))), 1e-12);
  EXPECT_NEAR(*out.theorem_bound, 26.98, 0.005);
  EXPECT_NEAR(out.lower_bound * out.lower_bound, out.ratio, 1e-15);
  EXPECT_NEAR(out.ratio, 1.3, 1e-15);
  ASSERT_TRUE(out.theorem_diagnostic.has_value());
  EXPECT_NEAR(*out.theorem_diagnostic, std::log(out.lower_bound) / std::sqrt(50.0 / std::log(100.0)), 1e-15);
}

TEST(Certificate, SupremumDominatesMomentRatio) {
  // sup over [T/2, T] of |D_N| is at least sqrt(M2 / M1), since Phi(t/T) is
  // supported there.
  const auto support = Resonator::from_log_length(22.0, table()).support(1e4);
  const std::uint64_t N = 8;
  const double T = 200.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto f = steinhaus_sample(seed, 1000);
    const double ratio = m2_exact(f, N, T, support, table(), bump()) / m1_exact(f, T, support, bump());
    SearchOptions options;
    options.window = SearchWindow{T / 2, T};
    const double eps = 1e-3;
    const auto sup = grid_sup(f, N, T, eps, table(), options);
    EXPECT_GE(sup.value + eps, std::sqrt(ratio)) << seed;
  }
}
