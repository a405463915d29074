#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "resonance/errors.hpp"
#include "resonance/ntcore.hpp"
#include "resonance/summation.hpp"

namespace resonance {

inline constexpr std::size_t kDefaultSupportBudget = 10'000'000;

/// One squarefree integer n in the resonator support, with r(n), t(n) and log n.
struct SupportEntry {
  std::uint64_t n;
  double r;
  double t;
  double log_n;
  std::uint32_t factor_offset;
  std::uint32_t factor_count;
};

/// Ascending list of support integers n <= cap, each carrying its prime factors
/// so that f(n) can be formed from prime values even when n exceeds the sieve.
class SupportSet {
 public:
  std::size_t size() const noexcept { return entries_.size(); }
  const SupportEntry& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const noexcept { return entries_.begin(); }
  auto end() const noexcept { return entries_.end(); }
  double cap() const noexcept { return cap_; }

  std::span<const std::uint64_t> primes_of(const SupportEntry& e) const {
    return std::span<const std::uint64_t>(factors_).subspan(e.factor_offset, e.factor_count);
  }

  std::vector<std::uint64_t> integers() const {
    std::vector<std::uint64_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.n);
    return out;
  }

  std::uint64_t max_integer() const { return entries_.empty() ? 0 : entries_.back().n; }

 private:
  friend class Resonator;
  std::vector<SupportEntry> entries_;
  std::vector<std::uint64_t> factors_;
  double cap_ = 0.0;
};

/// The resonator r: multiplicative, supported on squarefree integers, with
/// r(p) = lambda / (sqrt(p) log p) for lambda^2 <= p <= exp((log lambda)^2),
/// where lambda = sqrt(log X log log X). Logs are natural.
class Resonator {
 public:
  /// Smallest admissible log X; below it log log X is not positive enough.
  static constexpr double kMinLogLength = std::numbers::e;

  /// Prime window [lambda^2, exp((log lambda)^2)] for a given log X >= e.
  static std::pair<double, double> window_for(double log_x) {
    const double lambda = std::sqrt(log_x * std::log(log_x));
    const double log_lambda = std::log(lambda);
    return {lambda * lambda, std::exp(log_lambda * log_lambda)};
  }

  static Resonator build(double x, const FactorTable& table) {
    if (!(x > 0.0)) throw std::invalid_argument("resonator length X must be positive");
    return from_log_length(std::log(x), table);
  }

  static Resonator from_log_length(double log_x, const FactorTable& table) {
    if (!(log_x >= kMinLogLength) || !std::isfinite(log_x)) {
      throw std::invalid_argument("resonator needs X >= e^e (log X >= e), got log X = " +
                                  std::to_string(log_x));
    }
    Resonator res;
    res.log_x_ = log_x;
    res.lambda_ = std::sqrt(log_x * std::log(log_x));
    const double log_lambda = std::log(res.lambda_);
    res.support_lo_ = res.lambda_ * res.lambda_;
    res.support_hi_ = std::exp(log_lambda * log_lambda);
    res.alpha_default_ = std::pow(log_lambda, -3.0);
    if (res.support_lo_ <= res.support_hi_) {
      if (std::floor(res.support_hi_) > static_cast<double>(table.limit())) {
        throw resource_limit_error(
            "resonator window reaches " + std::to_string(res.support_hi_) +
                ", beyond sieve limit " + std::to_string(table.limit()),
            std::ceil(res.support_hi_));
      }
      res.primes_ = table.primes_in(res.support_lo_, res.support_hi_);
    }
    for (const auto p : res.primes_) {
      const double pd = static_cast<double>(p);
      const double r = res.lambda_ / (std::sqrt(pd) * std::log(pd));
      res.r_.push_back(r);
      res.t_.push_back(r / (1.0 + r * r));
    }
    return res;
  }

  /// Resonator for X too small for the construction: r(1) = 1 and nothing else.
  static Resonator degenerate(double log_x) {
    Resonator res;
    res.log_x_ = log_x;
    res.degenerate_ = true;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    res.lambda_ = res.support_lo_ = res.support_hi_ = res.alpha_default_ = nan;
    return res;
  }

  double log_length() const noexcept { return log_x_; }
  double length() const { return std::exp(log_x_); }
  double lambda() const noexcept { return lambda_; }
  double support_lo() const noexcept { return support_lo_; }
  double support_hi() const noexcept { return support_hi_; }
  double alpha_default() const noexcept { return alpha_default_; }
  bool degenerate() const noexcept { return degenerate_; }
  bool empty_support() const noexcept { return primes_.empty(); }

  std::span<const std::uint64_t> primes() const noexcept { return primes_; }
  std::span<const double> r_primes() const noexcept { return r_; }
  std::span<const double> t_primes() const noexcept { return t_; }

  double r_at_prime(std::uint64_t p) const {
    const auto i = index_of(p);
    return i == npos ? 0.0 : r_[i];
  }

  double t_at_prime(std::uint64_t p) const {
    const auto i = index_of(p);
    return i == npos ? 0.0 : t_[i];
  }

  double r_value(std::uint64_t n, const FactorTable& table) const {
    return multiplicative_value(n, table, r_);
  }

  double t_value(std::uint64_t n, const FactorTable& table) const {
    return multiplicative_value(n, table, t_);
  }

  /// Support integers n <= cap (including 1) with their factorizations.
  SupportSet support(double cap, std::size_t budget = kDefaultSupportBudget,
                     std::span<const std::uint64_t> excluded_primes = {}) const {
    if (!(cap >= 1.0)) throw std::invalid_argument("support cap must be >= 1");
    struct Raw {
      SupportEntry entry;
      std::vector<std::uint64_t> primes;
    };
    std::vector<Raw> raw;
    walk(cap, excluded_primes, [&](const SupportEntry& e, std::span<const std::uint64_t> ps) {
      if (raw.size() >= budget) {
        throw resource_limit_error("support enumeration exceeded budget of " +
                                       std::to_string(budget) + " integers (partial count " +
                                       std::to_string(raw.size() + 1) + ")",
                                   static_cast<double>(raw.size() + 1));
      }
      raw.push_back({e, std::vector<std::uint64_t>(ps.begin(), ps.end())});
      return true;
    });
    std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.entry.n < b.entry.n; });
    SupportSet out;
    out.cap_ = cap;
    out.entries_.reserve(raw.size());
    for (auto& item : raw) {
      SupportEntry e = item.entry;
      e.factor_offset = static_cast<std::uint32_t>(out.factors_.size());
      e.factor_count = static_cast<std::uint32_t>(item.primes.size());
      out.factors_.insert(out.factors_.end(), item.primes.begin(), item.primes.end());
      out.entries_.push_back(e);
    }
    return out;
  }

  std::vector<std::uint64_t> enumerate_support(double cap, std::size_t budget = kDefaultSupportBudget) const {
    return support(cap, budget).integers();
  }

  /// Number of support integers <= cap, stopping early once it passes stop_after.
  std::size_t count_support(double cap, std::size_t stop_after) const {
    std::size_t count = 0;
    walk(cap, {}, [&](const SupportEntry&, std::span<const std::uint64_t>) {
      ++count;
      return count <= stop_after;
    });
    return count;
  }

  /// Largest support integer c <= max_cap with count_support(c) <= max_count.
  double largest_cap_within(std::size_t max_count, double max_cap) const {
    if (max_count == 0) throw std::invalid_argument("max_count must be positive");
    auto snap = [&](double cap) { return static_cast<double>(support(cap, max_count + 1).max_integer()); };
    if (count_support(max_cap, max_count) <= max_count) return snap(max_cap);
    double lo = 0.0;
    double hi = std::log(max_cap);
    for (int iter = 0; iter < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (count_support(std::exp(mid), max_count) <= max_count) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return snap(std::exp(lo));
  }

  double sum_r_squared(double cap, std::size_t budget = kDefaultSupportBudget) const {
    compensated_sum acc;
    for (const auto& e : support(cap, budget)) acc += e.r * e.r;
    return acc.value();
  }

  double sum_t_over_sqrt(double cap, std::size_t budget = kDefaultSupportBudget) const {
    compensated_sum acc;
    for (const auto& e : support(cap, budget)) acc += e.t / std::sqrt(static_cast<double>(e.n));
    return acc.value();
  }

  /// log prod_{p not excluded} (1 + r(p)^2 p^alpha); alpha = 0 gives the plain product.
  double log_euler_product(double alpha = 0.0, std::span<const std::uint64_t> excluded_primes = {}) const {
    compensated_sum acc;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      if (contains(excluded_primes, primes_[i])) continue;
      const double weight = alpha == 0.0 ? 1.0 : std::pow(static_cast<double>(primes_[i]), alpha);
      acc += std::log1p(r_[i] * r_[i] * weight);
    }
    return acc.value();
  }

  double euler_product_one_plus_r2(std::span<const std::uint64_t> excluded_primes = {}) const {
    return std::exp(log_euler_product(0.0, excluded_primes));
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Resonator() = default;

  static bool contains(std::span<const std::uint64_t> set, std::uint64_t p) {
    return std::find(set.begin(), set.end(), p) != set.end();
  }

  std::size_t index_of(std::uint64_t p) const {
    const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return npos;
    return static_cast<std::size_t>(it - primes_.begin());
  }

  double multiplicative_value(std::uint64_t n, const FactorTable& table,
                              const std::vector<double>& prime_values) const {
    if (n == 0) throw std::invalid_argument("r and t are defined on positive integers");
    double value = 1.0;
    for (const auto& [p, e] : table.factorize(n)) {
      if (e > 1) return 0.0;
      const auto i = index_of(p);
      if (i == npos) return 0.0;
      value *= prime_values[i];
    }
    return value;
  }

  /// Depth-first products over ascending primes, visiting every support
  /// integer <= cap exactly once. visit returns false to stop the walk.
  template <class Visit>
  void walk(double cap, std::span<const std::uint64_t> excluded, Visit&& visit) const {
    constexpr double kTwo63 = 9223372036854775808.0;
    const bool beyond_u64 = cap >= kTwo63;
    const std::uint64_t cap_int =
        beyond_u64 ? (std::uint64_t{1} << 63) : static_cast<std::uint64_t>(std::floor(cap));
    std::vector<std::uint64_t> stack;
    bool stop = false;
    auto recurse = [&](auto&& self, std::size_t start, const SupportEntry& node) -> void {
      if (!visit(node, std::span<const std::uint64_t>(stack))) {
        stop = true;
        return;
      }
      for (std::size_t i = start; i < primes_.size() && !stop; ++i) {
        const std::uint64_t p = primes_[i];
        if (!excluded.empty() && contains(excluded, p)) continue;
        if (node.n > cap_int / p) {
          if (beyond_u64 && static_cast<double>(node.n) * static_cast<double>(p) <= cap) {
            throw resource_limit_error("support integer exceeds the 64-bit range");
          }
          break;
        }
        SupportEntry child{node.n * p, node.r * r_[i], node.t * t_[i],
                           node.log_n + std::log(static_cast<double>(p)), 0, 0};
        stack.push_back(p);
        self(self, i + 1, child);
        stack.pop_back();
      }
    };
    recurse(recurse, 0, SupportEntry{1, 1.0, 1.0, 0.0, 0, 0});
  }

  double log_x_ = 0.0;
  double lambda_ = 0.0;
  double support_lo_ = 0.0;
  double support_hi_ = 0.0;
  double alpha_default_ = 0.0;
  bool degenerate_ = false;
  std::vector<std::uint64_t> primes_;
  std::vector<double> r_;
  std::vector<double> t_;
};

inline Resonator build_resonator(double x, const FactorTable& table) { return Resonator::build(x, table); }

}  // namespace resonance
