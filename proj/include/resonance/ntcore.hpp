#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "resonance/errors.hpp"

namespace resonance {

inline constexpr std::uint64_t kDefaultSieveLimit = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kMaxSieveLimit = std::numeric_limits<std::uint32_t>::max();
inline constexpr std::size_t kDefaultSieveMemoryCap = std::size_t{512} << 20;

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// Smallest-prime-factor table for 2 <= n <= limit. Immutable once built.
class FactorTable {
 public:
  explicit FactorTable(std::uint64_t limit, std::size_t memory_cap = kDefaultSieveMemoryCap)
      : limit_(limit) {
    if (limit < 2) {
      throw std::invalid_argument("factor table limit must be at least 2");
    }
    if (limit > kMaxSieveLimit) {
      throw resource_limit_error("factor table limit exceeds 2^32-1", static_cast<double>(limit));
    }
    const double bytes = static_cast<double>(limit + 1) * sizeof(std::uint32_t);
    if (bytes > static_cast<double>(memory_cap)) {
      throw resource_limit_error(
          "factor table of limit " + std::to_string(limit) + " needs " +
              std::to_string(static_cast<std::uint64_t>(bytes)) + " bytes, over the memory cap",
          bytes);
    }
    spf_.assign(limit + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
      if (spf_[i] != 0) continue;
      spf_[i] = static_cast<std::uint32_t>(i);
      for (std::uint64_t j = i * i; j <= limit; j += i) {
        if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
      }
    }
  }

  std::uint64_t limit() const noexcept { return limit_; }

  /// Smallest prime factor of n; defined for 2 <= n <= limit.
  std::uint32_t spf(std::uint64_t n) const {
    if (n < 2) throw std::out_of_range("spf is undefined below 2");
    check_range(n);
    return spf_[n];
  }

  bool is_prime(std::uint64_t n) const {
    if (n < 2) return false;
    check_range(n);
    return spf_[n] == n;
  }

  /// Prime factorization with strictly increasing primes; factorize(1) is empty.
  std::vector<PrimePower> factorize(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("cannot factorize 0");
    check_range(n);
    std::vector<PrimePower> out;
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      unsigned e = 0;
      while (n % p == 0) {
        n /= p;
        ++e;
      }
      out.push_back({p, e});
    }
    return out;
  }

  bool is_squarefree(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("is_squarefree needs n >= 1");
    check_range(n);
    while (n > 1) {
      const std::uint64_t p = spf_[n];
      n /= p;
      if (n % p == 0) return false;
    }
    return true;
  }

  /// Primes p with lo <= p <= hi, ascending. lo > hi yields an empty list.
  std::vector<std::uint64_t> primes_in(double lo, double hi) const {
    std::vector<std::uint64_t> out;
    if (!(lo <= hi)) return out;
    const double top = std::floor(hi);
    if (top > static_cast<double>(limit_)) {
      throw std::out_of_range("primes_in upper end " + std::to_string(hi) +
                              " exceeds sieve limit " + std::to_string(limit_));
    }
    if (top < 2.0) return out;
    const std::uint64_t first = lo <= 2.0 ? 2 : static_cast<std::uint64_t>(std::ceil(lo));
    const auto last = static_cast<std::uint64_t>(top);
    for (std::uint64_t n = first; n <= last; ++n) {
      if (spf_[n] == n) out.push_back(n);
    }
    return out;
  }

 private:
  void check_range(std::uint64_t n) const {
    if (n > limit_) {
      throw std::out_of_range(std::to_string(n) + " exceeds sieve limit " +
                              std::to_string(limit_));
    }
  }

  std::uint64_t limit_;
  std::vector<std::uint32_t> spf_;
};

inline FactorTable build_factor_table(std::uint64_t limit,
                                      std::size_t memory_cap = kDefaultSieveMemoryCap) {
  return FactorTable(limit, memory_cap);
}

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  if (a == 0 && b == 0) throw std::invalid_argument("gcd(0, 0) is undefined");
  return std::gcd(a, b);
}

/// log(x / y) for positive integers, accurate when x and y are close.
inline double log_ratio(std::uint64_t x, std::uint64_t y) {
  if (x == y) return 0.0;
  if (x > y) return std::log1p(static_cast<double>(x - y) / static_cast<double>(y));
  return -std::log1p(static_cast<double>(y - x) / static_cast<double>(x));
}

}  // namespace resonance
