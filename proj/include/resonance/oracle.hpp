#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <numbers>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "resonance/dirichlet.hpp"
#include "resonance/errors.hpp"
#include "resonance/moments.hpp"
#include "resonance/ntcore.hpp"
#include "resonance/summation.hpp"

// Deliberately naive reference implementations. Each one shares as little code
// as possible with the fast paths it checks.

namespace resonance::oracle {

inline constexpr std::uint64_t kBruteForceBudget = 10'000;

/// A small hand-written resonator: explicit values on a finite set of integers.
struct ToyResonator {
  std::map<std::uint64_t, double> values;
  bool multiplicative = true;
  bool squarefree = true;

  double operator()(std::uint64_t n) const {
    const auto it = values.find(n);
    return it == values.end() ? 0.0 : it->second;
  }

  SupportCoefficients coefficients() const {
    SupportCoefficients out;
    for (const auto& [n, r] : values) {
      if (r == 0.0) continue;
      out.n.push_back(n);
      out.r.push_back(r);
    }
    out.squarefree_multiplicative = multiplicative && squarefree;
    return out;
  }
};

/// sum over m, n <= N and a, b <= X with m a = n b of r(a) r(b), by four loops.
inline double diagonal_sum_bruteforce(const ToyResonator& r, std::uint64_t N, std::uint64_t X,
                                      std::uint64_t budget = kBruteForceBudget) {
  if (N == 0) throw std::invalid_argument("N must be positive");
  if (static_cast<double>(N) * static_cast<double>(X) > static_cast<double>(budget)) {
    throw resource_limit_error("brute-force diagonal exceeds its budget", static_cast<double>(N) * X);
  }
  double total = 0.0;
  for (std::uint64_t a = 1; a <= X; ++a) {
    const double ra = r(a);
    if (ra == 0.0) continue;
    for (std::uint64_t b = 1; b <= X; ++b) {
      const double rb = r(b);
      if (rb == 0.0) continue;
      for (std::uint64_t m = 1; m <= N; ++m) {
        for (std::uint64_t n = 1; n <= N; ++n) {
          if (m * a == n * b) total += ra * rb;
        }
      }
    }
  }
  return total;
}

/// M2 by composite Simpson on [T/2, T] with the bump evaluated pointwise.
inline double m2_bruteforce_quadrature(const UnimodularCMF& f, std::uint64_t N, double T, const SupportSet& support,
                                       const FactorTable& table, std::size_t panels = 1'000'000) {
  if (panels % 2 == 1) ++panels;
  const auto fv = f.values_up_to(N, table);
  std::vector<std::complex<double>> c;
  for (const auto& e : support) c.push_back(support_value(f, support, e) * e.r);
  auto integrand = [&](double t) {
    std::complex<double> d{};
    for (std::uint64_t n = 1; n <= N; ++n) {
      d += fv[n] * std::polar(1.0, static_cast<double>(std::fmod(static_cast<long double>(t) *
                                                                       std::log(static_cast<long double>(n)),
                                                                   2.0L * std::numbers::pi_v<long double>)));
    }
    d /= std::sqrt(static_cast<double>(N));
    std::complex<double> rr{};
    for (std::size_t k = 0; k < support.size(); ++k) {
      rr += c[k] * std::polar(1.0, static_cast<double>(std::fmod(static_cast<long double>(t) *
                                                                       static_cast<long double>(support[k].log_n),
                                                                   2.0L * std::numbers::pi_v<long double>)));
    }
    // Phi(t / T) written out directly, not through Bump.
    const double y = t / T;
    double phi = 0.0;
    if (y > 0.5 && y < 1.0) {
      auto psi = [](double s) { return s <= 0 ? 0.0 : s >= 1 ? 1.0 : 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s))); };
      phi = std::min(psi((y - 0.5) * 8.0), psi((1.0 - y) * 8.0));
    }
    return std::norm(d) * std::norm(rr) * phi;
  };
  const double a = 0.5 * T;
  const double h = (T - a) / static_cast<double>(panels);
  compensated_sum acc;
  acc += integrand(a);
  acc += integrand(T);
  for (std::size_t i = 1; i < panels; ++i) {
    acc += (i % 2 == 1 ? 4.0 : 2.0) * integrand(a + h * static_cast<double>(i));
  }
  return acc.value() * h / 3.0;
}

/// Checks that (g, h, a', b') -> (a, b, m, n) = (g a', g b', h b', h a') with
/// (a', b') = 1 is a bijection onto the solutions of m a = n b, m, n <= N, a, b <= X.
inline bool parametrization_bijection_check(std::uint64_t N, std::uint64_t X) {
  if (static_cast<double>(N) * static_cast<double>(X) > static_cast<double>(kBruteForceBudget)) {
    throw resource_limit_error("bijection check exceeds its budget", static_cast<double>(N) * X);
  }
  using Tuple = std::tuple<std::uint64_t, std::uint64_t, std::uint64_t, std::uint64_t>;
  std::vector<Tuple> direct;
  for (std::uint64_t a = 1; a <= X; ++a)
    for (std::uint64_t b = 1; b <= X; ++b)
      for (std::uint64_t m = 1; m <= N; ++m)
        for (std::uint64_t n = 1; n <= N; ++n)
          if (m * a == n * b) direct.emplace_back(a, b, m, n);

  std::vector<Tuple> built;
  for (std::uint64_t ap = 1; ap <= X; ++ap) {
    for (std::uint64_t bp = 1; bp <= X; ++bp) {
      if (std::gcd(ap, bp) != 1) continue;
      for (std::uint64_t g = 1; g * std::max(ap, bp) <= X; ++g) {
        for (std::uint64_t h = 1; h * std::max(ap, bp) <= N; ++h) built.emplace_back(g * ap, g * bp, h * bp, h * ap);
      }
    }
  }
  std::sort(direct.begin(), direct.end());
  std::sort(built.begin(), built.end());
  return direct == built;
}

}  // namespace resonance::oracle
