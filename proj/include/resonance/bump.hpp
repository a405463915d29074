#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/special_functions/sinc.hpp>

#include "resonance/quadrature.hpp"

namespace resonance {

/// Smooth step from 0 (s <= 0) to 1 (s >= 1):
/// psi(s) = sigma(s) / (sigma(s) + sigma(1 - s)) with sigma(s) = exp(-1/s).
inline double smooth_transition(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s)));
}

/// The cutoff Phi: 0 outside [1/2, 1], 1 on [5/8, 7/8], with mirror-image
/// smooth ramps of width 1/8, so Phi(y) = Phi(3/2 - y).
///
/// The transform uses the convention hat(xi) = int Phi(x) exp(-i xi x) dx.
/// Folding the symmetric ramps gives hat(xi) = exp(-3 i xi / 4) A(xi) with a
/// real even amplitude
///   A(xi) = sinc(xi/8)/4 + 1/4 int_0^1 psi(s) cos(xi (1/4 - s/8)) ds,
/// the plateau handled in closed form and the ramp by adaptive quadrature.
/// Amplitudes are memoized on |xi| rounded to 12 significant digits.
class Bump {
 public:
  static constexpr double ramp_width = 0.125;
  static constexpr double support_lo = 0.5;
  static constexpr double support_hi = 1.0;

  explicit Bump(double tolerance = 1e-12, std::size_t max_intervals = 400'000)
      : tolerance_(tolerance), max_intervals_(max_intervals), cache_(std::make_shared<Cache>()) {
    if (!(tolerance > 0.0)) throw std::invalid_argument("bump tolerance must be positive");
  }

  double tolerance() const noexcept { return tolerance_; }

  double operator()(double y) const { return phi(y); }

  static double phi(double y) {
    if (y <= support_lo || y >= support_hi) return 0.0;
    if (y >= 0.625 && y <= 0.875) return 1.0;
    if (y < 0.625) return smooth_transition((y - support_lo) / ramp_width);
    return smooth_transition((support_hi - y) / ramp_width);
  }

  std::complex<double> hat(double xi) const {
    if (!std::isfinite(xi)) throw std::invalid_argument("phi_hat needs a finite argument");
    return std::polar(1.0, -0.75 * xi) * amplitude(xi);
  }

  /// hat(0) = int Phi = 3/8 for this construction (computed, not hard-coded).
  double hat_at_zero() const { return amplitude(0.0); }

  /// |hat(xi)|, which equals |A(xi)|.
  double hat_abs(double xi) const { return std::abs(amplitude(xi)); }

  /// Real amplitude A(xi) with hat(xi) = exp(-3 i xi/4) A(xi).
  double amplitude(double xi) const {
    const double key = memo_key(std::abs(xi));
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
    }
    const double value = compute_amplitude(key);
    std::lock_guard lock(cache_->mutex);
    cache_->values.try_emplace(key, value);
    return value;
  }

  /// Uncached amplitude at exactly xi, with the achieved error estimate.
  QuadratureResult<double> amplitude_with_error(double xi, double tolerance) const {
    const double a = std::abs(xi);
    QuadratureOptions options;
    options.abs_tol = 4.0 * tolerance;
    options.rel_tol = 0.0;
    options.initial_panels = 1 + static_cast<std::size_t>(a / (32.0 * std::numbers::pi));
    options.max_intervals = max_intervals_;
    auto ramp = integrate_adaptive(
        [a](double s) { return smooth_transition(s) * std::cos(a * (0.25 - 0.125 * s)); }, 0.0, 1.0,
        options);
    ramp.value = 0.25 * boost::math::sinc_pi(a / 8.0) + 0.25 * ramp.value;
    ramp.error *= 0.25;
    return ramp;
  }

  /// Empirical C_nu = max over the grid of |hat(xi)| |xi|^nu; needs |xi| >= 1.
  double decay_constant(int nu, std::span<const double> xi_grid) const {
    if (nu < 0) throw std::invalid_argument("decay order must be nonnegative");
    double best = 0.0;
    for (const double xi : xi_grid) {
      if (!(std::abs(xi) >= 1.0)) throw std::invalid_argument("decay grid points need |xi| >= 1");
      best = std::max(best, hat_abs(xi) * std::pow(std::abs(xi), nu));
    }
    return best;
  }

  std::size_t cached_values() const {
    std::lock_guard lock(cache_->mutex);
    return cache_->values.size();
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::unordered_map<double, double> values;
  };

  static double memo_key(double xi) {
    if (xi == 0.0) return 0.0;
    const double scale = std::pow(10.0, 11.0 - std::floor(std::log10(xi)));
    return std::round(xi * scale) / scale;
  }

  double compute_amplitude(double xi) const {
    const auto result = amplitude_with_error(xi, tolerance_);
    if (!(result.error <= tolerance_)) {
      throw numerical_failure("phi_hat quadrature missed its tolerance", result.error);
    }
    return result.value;
  }

  double tolerance_;
  std::size_t max_intervals_;
  std::shared_ptr<Cache> cache_;
};

/// Log-spaced grid of `count` points on [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {lo};
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo * std::exp(step * static_cast<double>(i)));
  out.back() = hi;
  return out;
}

/// The published grid behind the off-diagonal constant: 2001 log-spaced points on [1, 1e4].
inline std::vector<double> default_decay_grid() { return log_grid(1.0, 1e4, 2001); }

}  // namespace resonance
