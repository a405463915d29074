#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "resonance/ntcore.hpp"

namespace resonance {

enum class CmfKind { constant_one, archimedean, steinhaus };

namespace detail {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Uniform variate in [0, 1) keyed by (seed, prime).
///
/// u = (splitmix64(seed ^ splitmix64(p)) >> 11) * 2^-53. Each prime gets its
/// own hash input, so values can be queried in any order and are identical
/// across runs and platforms.
inline constexpr double steinhaus_uniform(std::uint64_t seed, std::uint64_t prime) {
  const std::uint64_t h = detail::splitmix64(seed ^ detail::splitmix64(prime));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// A completely multiplicative f with |f(n)| = 1, determined by its prime values.
class UnimodularCMF {
 public:
  static UnimodularCMF constant_one() { return UnimodularCMF(CmfKind::constant_one, 0.0, 0, kNoLimit); }

  /// f(n) = n^{i alpha}.
  static UnimodularCMF archimedean(double alpha) {
    if (!std::isfinite(alpha)) throw std::invalid_argument("archimedean alpha must be finite");
    return UnimodularCMF(CmfKind::archimedean, alpha, 0, kNoLimit);
  }

  /// f(p) = exp(2 pi i u_p) with u_p = steinhaus_uniform(seed, p), for p <= prime_limit.
  static UnimodularCMF steinhaus(std::uint64_t seed, std::uint64_t prime_limit) {
    if (prime_limit < 2) throw std::invalid_argument("steinhaus prime_limit must be >= 2");
    return UnimodularCMF(CmfKind::steinhaus, 0.0, seed, prime_limit);
  }

  CmfKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t prime_limit() const noexcept { return prime_limit_; }
  bool is_real() const noexcept { return kind_ == CmfKind::constant_one; }

  std::complex<double> at_prime(std::uint64_t p) const {
    switch (kind_) {
      case CmfKind::constant_one:
        return 1.0;
      case CmfKind::archimedean:
        return std::polar(1.0, alpha_ * std::log(static_cast<double>(p)));
      case CmfKind::steinhaus:
        break;
    }
    if (p > prime_limit_) {
      throw std::out_of_range("prime " + std::to_string(p) + " exceeds f prime_limit " +
                              std::to_string(prime_limit_));
    }
    std::lock_guard lock(cache_->mutex);
    auto [it, inserted] = cache_->values.try_emplace(p);
    if (inserted) {
      it->second = std::polar(1.0, 2.0 * std::numbers::pi * steinhaus_uniform(seed_, p));
    }
    return it->second;
  }

  /// f(n) for 1 <= n <= table.limit().
  std::complex<double> operator()(std::uint64_t n, const FactorTable& table) const {
    if (n == 0) throw std::invalid_argument("f is defined on positive integers");
    switch (kind_) {
      case CmfKind::constant_one:
        if (n > table.limit()) throw std::out_of_range("n exceeds sieve limit");
        return 1.0;
      case CmfKind::archimedean:
        if (n > table.limit()) throw std::out_of_range("n exceeds sieve limit");
        return std::polar(1.0, alpha_ * std::log(static_cast<double>(n)));
      case CmfKind::steinhaus:
        break;
    }
    std::complex<double> value = 1.0;
    for (const auto& [p, e] : table.factorize(n)) {
      const auto fp = at_prime(p);
      for (unsigned k = 0; k < e; ++k) value *= fp;
    }
    return value;
  }

  /// f(1..n) as a vector indexed by n (entry 0 unused).
  std::vector<std::complex<double>> values_up_to(std::uint64_t n, const FactorTable& table) const {
    if (n > table.limit()) throw std::out_of_range("n exceeds sieve limit");
    std::vector<std::complex<double>> out(n + 1, 1.0);
    if (n == 0) return out;
    out[0] = 0.0;
    for (std::uint64_t k = 2; k <= n; ++k) {
      if (kind_ == CmfKind::archimedean) {
        out[k] = std::polar(1.0, alpha_ * std::log(static_cast<double>(k)));
      } else if (kind_ == CmfKind::steinhaus) {
        const std::uint64_t p = table.spf(k);
        out[k] = at_prime(p) * out[k / p];
      }
    }
    return out;
  }

 private:
  static constexpr std::uint64_t kNoLimit = std::numeric_limits<std::uint64_t>::max();

  struct Cache {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, std::complex<double>> values;
  };

  UnimodularCMF(CmfKind kind, double alpha, std::uint64_t seed, std::uint64_t prime_limit)
      : kind_(kind), alpha_(alpha), seed_(seed), prime_limit_(prime_limit),
        cache_(std::make_shared<Cache>()) {}

  CmfKind kind_;
  double alpha_;
  std::uint64_t seed_;
  std::uint64_t prime_limit_;
  std::shared_ptr<Cache> cache_;
};

inline UnimodularCMF steinhaus_sample(std::uint64_t seed, std::uint64_t prime_limit) {
  return UnimodularCMF::steinhaus(seed, prime_limit);
}

inline UnimodularCMF archimedean_cmf(double alpha) { return UnimodularCMF::archimedean(alpha); }

inline std::complex<double> eval_cmf(const UnimodularCMF& f, std::uint64_t n, const FactorTable& table) {
  return f(n, table);
}

}  // namespace resonance
