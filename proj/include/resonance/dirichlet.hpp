#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "resonance/errors.hpp"
#include "resonance/multfn.hpp"
#include "resonance/ntcore.hpp"
#include "resonance/resonator.hpp"
#include "resonance/summation.hpp"

namespace resonance {

/// P(t) = scale * sum_k c_k exp(i t log n_k).
///
/// Phases t log n are reduced mod 2 pi in long double, so evaluations at
/// |t| ~ 1e11 keep about 1e-8 rad of absolute phase accuracy.
class DirichletPolynomial {
 public:
  DirichletPolynomial() = default;

  DirichletPolynomial(std::vector<std::uint64_t> n, std::vector<std::complex<double>> coeff, double scale = 1.0)
      : n_(std::move(n)), coeff_(std::move(coeff)), scale_(scale) {
    if (n_.size() != coeff_.size()) throw std::invalid_argument("term and coefficient counts differ");
    log_n_.reserve(n_.size());
    for (const auto k : n_) {
      if (k == 0) throw std::invalid_argument("Dirichlet polynomial frequencies need n >= 1");
      log_n_.push_back(std::log(static_cast<long double>(k)));
    }
  }

  std::size_t size() const noexcept { return n_.size(); }
  double scale() const noexcept { return scale_; }
  const std::vector<std::uint64_t>& frequencies() const noexcept { return n_; }
  const std::vector<std::complex<double>>& coefficients() const noexcept { return coeff_; }
  long double log_frequency(std::size_t k) const { return log_n_[k]; }

  /// exp(i t log n_k) with the phase reduced in extended precision.
  std::complex<double> phase(std::size_t k, long double t) const {
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const long double angle = std::fmod(t * log_n_[k], two_pi);
    return std::polar(1.0, static_cast<double>(angle));
  }

  std::complex<double> operator()(long double t) const {
    compensated_complex_sum acc;
    for (std::size_t k = 0; k < n_.size(); ++k) acc += coeff_[k] * phase(k, t);
    return scale_ * acc.value();
  }

  /// Upper bound for |P'(t)|: scale * sum |c_k| log n_k.
  double derivative_bound() const {
    compensated_sum acc;
    for (std::size_t k = 0; k < n_.size(); ++k) acc += std::abs(coeff_[k]) * static_cast<double>(log_n_[k]);
    return scale_ * acc.value();
  }

 private:
  std::vector<std::uint64_t> n_;
  std::vector<long double> log_n_;
  std::vector<std::complex<double>> coeff_;
  double scale_ = 1.0;
};

/// D_N(t) = N^{-1/2} sum_{n <= N} f(n) n^{it}.
inline DirichletPolynomial make_dirichlet(const UnimodularCMF& f, std::uint64_t N, const FactorTable& table) {
  if (N == 0) throw std::invalid_argument("N must be positive");
  const auto values = f.values_up_to(N, table);
  std::vector<std::uint64_t> n(N);
  std::vector<std::complex<double>> c(N);
  for (std::uint64_t k = 1; k <= N; ++k) {
    n[k - 1] = k;
    c[k - 1] = values[k];
  }
  return DirichletPolynomial(std::move(n), std::move(c), 1.0 / std::sqrt(static_cast<double>(N)));
}

/// f(n) for a support entry, formed from prime values.
inline std::complex<double> support_value(const UnimodularCMF& f, const SupportSet& support, const SupportEntry& e) {
  std::complex<double> value = 1.0;
  for (const auto p : support.primes_of(e)) value *= f.at_prime(p);
  return value;
}

/// R(t) = sum over the support of f(n) r(n) n^{it}.
///
/// The coefficient is f(n) r(n), not conj(f(n)) r(n): with D_N and R both
/// built from n^{+it}, the surviving terms of |R|^2 |D_N|^2 are those with
/// a n = b m, and only this choice makes their phases f(an) conj(f(bm)) = 1.
inline DirichletPolynomial make_resonator_polynomial(const UnimodularCMF& f, const SupportSet& support) {
  std::vector<std::uint64_t> n;
  std::vector<std::complex<double>> c;
  n.reserve(support.size());
  c.reserve(support.size());
  for (const auto& e : support) {
    n.push_back(e.n);
    c.push_back(support_value(f, support, e) * e.r);
  }
  return DirichletPolynomial(std::move(n), std::move(c), 1.0);
}

inline std::complex<double> eval_DN(const UnimodularCMF& f, std::uint64_t N, double t, const FactorTable& table) {
  return make_dirichlet(f, N, table)(t);
}

inline std::complex<double> eval_R(const UnimodularCMF& f, double t, const SupportSet& support) {
  return make_resonator_polynomial(f, support)(t);
}

struct SearchWindow {
  double lo;
  double hi;
};

struct SearchOptions {
  std::optional<SearchWindow> window;  // defaults to [-T, T]
  std::uint64_t budget_terms = 100'000'000;
  std::size_t resync_every = 10'000;
  std::size_t trace_stride = 0;
  std::ostream* trace = nullptr;
  std::size_t guided_candidates = 8;
};

struct SearchResult {
  double t_star = 0.0;
  double value = 0.0;
  double grid_step = 0.0;
  int refinement_iterations = 0;
  double certified_slack = 0.0;
  std::size_t grid_points = 0;
  double window_lo = 0.0;
  double window_hi = 0.0;
  bool certified = false;
};

namespace detail {

/// Grid t_k = (lo (K - k) + hi k) / K for k = first..last, visited in order.
/// Terms advance by per-frequency rotors and are re-synchronized from direct
/// phase evaluation every `resync_every` steps.
template <class Visit>
void scan_grid(const DirichletPolynomial& poly, double lo, double hi, std::size_t intervals, std::size_t first,
               std::size_t last, std::size_t resync_every, Visit&& visit) {
  const std::size_t terms = poly.size();
  const auto K = static_cast<double>(intervals);
  auto grid_t = [&](std::size_t k) {
    if (intervals == 0) return lo;
    return (lo * (K - static_cast<double>(k)) + hi * static_cast<double>(k)) / K;
  };
  const double step = intervals == 0 ? 0.0 : (hi - lo) / K;
  std::vector<std::complex<double>> rotor(terms);
  std::vector<std::complex<double>> turn(terms);
  for (std::size_t j = 0; j < terms; ++j) turn[j] = poly.phase(j, step);
  const auto& coeff = poly.coefficients();
  const std::size_t resync = std::max<std::size_t>(1, resync_every);
  for (std::size_t k = first; k <= last; ++k) {
    const double t = grid_t(k);
    if ((k - first) % resync == 0) {
      for (std::size_t j = 0; j < terms; ++j) rotor[j] = coeff[j] * poly.phase(j, t);
    } else {
      for (std::size_t j = 0; j < terms; ++j) rotor[j] *= turn[j];
    }
    std::complex<double> sum = 0.0;
    for (std::size_t j = 0; j < terms; ++j) sum += rotor[j];
    visit(k, t, std::abs(sum) * poly.scale());
  }
}

/// Strictly better: larger value, then smaller |t|, then smaller t.
inline bool better(double value, double t, double best_value, double best_t) {
  if (value != best_value) return value > best_value;
  if (std::abs(t) != std::abs(best_t)) return std::abs(t) < std::abs(best_t);
  return t < best_t;
}

/// Golden-section maximization of |P|^2 on [a, b] until the bracket is
/// narrower than 1e-10 max(1, |t|).
inline std::pair<double, int> refine_peak(const DirichletPolynomial& poly, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto g = [&](double t) { return std::norm(poly(t)); };
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double gc = g(c);
  double gd = g(d);
  int iterations = 0;
  // Stop a few ulps above the abscissa resolution, so large |t| still refines.
  const double tol = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(0.5 * (a + b)));
  while (b - a >= tol && iterations < 500) {
    ++iterations;
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - inv_phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + inv_phi * (b - a);
      gd = g(d);
    }
    if (!(a < c && c < d && d < b)) break;
  }
  return {gc >= gd ? c : d, iterations};
}

inline SearchWindow resolve_window(double T, const SearchOptions& options) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  const SearchWindow w = options.window.value_or(SearchWindow{-T, T});
  if (!(w.lo <= w.hi) || !std::isfinite(w.lo) || !std::isfinite(w.hi)) {
    throw std::invalid_argument("search window must satisfy lo <= hi");
  }
  return w;
}

/// Fine scan of |poly| over [lo, hi] with step <= max_step, then refinement.
inline SearchResult scan_and_refine(const DirichletPolynomial& poly, double lo, double hi, double max_step,
                                    bool mirror, const SearchOptions& options) {
  std::size_t intervals = hi > lo ? static_cast<std::size_t>(std::ceil((hi - lo) / max_step)) : 0;
  if (intervals == 0 && hi > lo) intervals = 1;
  if (mirror && intervals % 2 == 1) ++intervals;
  const double points = static_cast<double>(intervals + 1);
  const double work = points * static_cast<double>(poly.size());
  if (work > static_cast<double>(options.budget_terms)) {
    const double scale = work / static_cast<double>(options.budget_terms);
    throw resource_limit_error("grid of " + std::to_string(intervals + 1) + " points x " +
                                   std::to_string(poly.size()) + " terms exceeds the evaluation budget; "
                                   "increase eps by a factor of at least " + std::to_string(scale),
                               work);
  }
  SearchResult result;
  result.window_lo = lo;
  result.window_hi = hi;
  result.grid_step = intervals == 0 ? 0.0 : (hi - lo) / static_cast<double>(intervals);
  result.grid_points = intervals + 1;
  double best_t = lo;
  double best_v = -1.0;
  const std::size_t first = mirror ? intervals / 2 : 0;
  std::size_t visited = 0;
  scan_grid(poly, lo, hi, intervals, first, intervals, options.resync_every,
            [&](std::size_t, double t, double v) {
              if (options.trace != nullptr && options.trace_stride > 0 && visited % options.trace_stride == 0) {
                *options.trace << t << ',' << v << '\n';
              }
              ++visited;
              const double candidate = mirror ? -std::abs(t) : t;
              if (better(v, candidate, best_v, best_t)) {
                best_v = v;
                best_t = candidate;
              }
            });
  result.t_star = best_t;
  result.value = std::abs(poly(best_t));
  if (intervals > 0) {
    const double a = std::max(lo, best_t - result.grid_step);
    const double b = std::min(hi, best_t + result.grid_step);
    const auto [t_ref, iterations] = refine_peak(poly, a, b);
    result.refinement_iterations = iterations;
    const double v_ref = std::abs(poly(t_ref));
    if (better(v_ref, t_ref, result.value, result.t_star)) {
      result.t_star = t_ref;
      result.value = v_ref;
    }
  }
  return result;
}

}  // namespace detail

/// Certified grid search for sup |D_N(t)| over the window.
///
/// The step is at most 2 eps / (sqrt(N) log N), so by |D_N'| <= sqrt(N) log N
/// the true supremum exceeds the best grid value by at most eps.
inline SearchResult grid_sup(const UnimodularCMF& f, std::uint64_t N, double T, double eps, const FactorTable& table,
                             const SearchOptions& options = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const auto window = detail::resolve_window(T, options);
  const auto poly = make_dirichlet(f, N, table);
  if (N == 1) {
    SearchResult result;
    result.window_lo = window.lo;
    result.window_hi = window.hi;
    result.t_star = std::clamp(0.0, window.lo, window.hi);
    result.value = std::abs(poly(result.t_star));
    result.grid_step = window.hi - window.lo;
    result.grid_points = 1;
    result.certified = true;
    return result;
  }
  const double sqrt_n = std::sqrt(static_cast<double>(N));
  const double derivative = sqrt_n * std::log(static_cast<double>(N));
  const double max_step = 2.0 * eps / derivative;
  const bool mirror = f.is_real() && window.lo == -window.hi;
  auto result = detail::scan_and_refine(poly, window.lo, window.hi, max_step, mirror, options);
  result.certified_slack = 0.5 * result.grid_step * derivative;
  result.certified = true;
  return result;
}

/// Search steered by the resonator: locate the largest local maxima of |R|
/// on a coarse grid and search |D_N| finely around each. The answer is a true
/// value of |D_N| (hence a lower bound for the supremum) without a slack bound.
inline SearchResult resonance_guided_search(const SupportSet& support, const UnimodularCMF& f, std::uint64_t N,
                                            double T, double coarse_eps, const FactorTable& table,
                                            const SearchOptions& options = {}) {
  if (!(coarse_eps > 0.0)) throw std::invalid_argument("coarse_eps must be positive");
  if (support.size() <= 1 || N == 1) return grid_sup(f, N, T, coarse_eps, table, options);
  const auto window = detail::resolve_window(T, options);
  const auto dn = make_dirichlet(f, N, table);
  const auto resonator = make_resonator_polynomial(f, support);
  const double derivative = std::sqrt(static_cast<double>(N)) * std::log(static_cast<double>(N));
  const double coarse_step = 2.0 * coarse_eps / derivative;

  std::size_t intervals = static_cast<std::size_t>(std::ceil((window.hi - window.lo) / coarse_step));
  intervals = std::max<std::size_t>(intervals, window.hi > window.lo ? 1 : 0);
  const double work = static_cast<double>(intervals + 1) * static_cast<double>(resonator.size() + dn.size());
  if (work > static_cast<double>(options.budget_terms)) {
    throw resource_limit_error("guided coarse grid exceeds the evaluation budget; increase coarse_eps", work);
  }
  std::vector<double> values(intervals + 1);
  std::vector<double> ts(intervals + 1);
  detail::scan_grid(resonator, window.lo, window.hi, intervals, 0, intervals, options.resync_every,
                    [&](std::size_t k, double t, double v) {
                      values[k] = v;
                      ts[k] = t;
                    });
  std::vector<std::size_t> peaks;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const bool left = k == 0 || values[k] >= values[k - 1];
    const bool right = k + 1 == values.size() || values[k] >= values[k + 1];
    if (left && right) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) {
    return detail::better(values[a], ts[a], values[b], ts[b]);
  });
  if (peaks.size() > options.guided_candidates) peaks.resize(options.guided_candidates);

  SearchResult best;
  best.value = -1.0;
  SearchOptions local = options;
  local.trace = nullptr;
  for (const auto k : peaks) {
    const double lo = std::max(window.lo, ts[k] - coarse_step);
    const double hi = std::min(window.hi, ts[k] + coarse_step);
    auto candidate = detail::scan_and_refine(dn, lo, hi, 0.1 * coarse_step, false, local);
    if (detail::better(candidate.value, candidate.t_star, best.value, best.t_star)) best = candidate;
  }
  best.window_lo = window.lo;
  best.window_hi = window.hi;
  best.certified = false;
  best.certified_slack = 0.0;
  return best;
}

}  // namespace resonance
