#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "resonance/errors.hpp"
#include "resonance/summation.hpp"

namespace resonance {

struct QuadratureOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-10;
  std::size_t initial_panels = 1;
  std::size_t max_intervals = 400'000;
};

template <class Value>
struct QuadratureResult {
  Value value;
  double error;
  double l1;
  std::size_t intervals;
};

namespace detail {

template <class Value>
struct Interval {
  double a;
  double b;
  Value value;
  double error;
  double l1;
};

/// 61-point Gauss-Kronrod on [a, b]; error is |Kronrod - Gauss(30)|.
template <class F>
auto gauss_kronrod_61(F& f, double a, double b) {
  using Value = std::decay_t<decltype(f(a))>;
  using kronrod = boost::math::quadrature::gauss_kronrod<double, 61>;
  using gauss = boost::math::quadrature::gauss<double, 30>;
  const auto& x = kronrod::abscissa();
  const auto& wk = kronrod::weights();
  const auto& wg = gauss::weights();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Value f0 = f(center);
  Value k_sum = f0 * wk[0];
  Value g_sum = Value{};
  double l1 = std::abs(f0) * wk[0];
  for (std::size_t i = 1; i < x.size(); ++i) {
    const Value fp = f(center + half * x[i]);
    const Value fm = f(center - half * x[i]);
    k_sum += (fp + fm) * wk[i];
    l1 += (std::abs(fp) + std::abs(fm)) * wk[i];
    if (i % 2 == 1) g_sum += (fp + fm) * wg[i / 2];
  }
  const Value value = k_sum * half;
  const double error = std::abs((k_sum - g_sum) * half);
  return Interval<Value>{a, b, value, error, l1 * std::abs(half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration: start from `initial_panels`
/// equal panels and bisect the worst panel until the summed error estimate is
/// below max(abs_tol, rel_tol * L1, roundoff floor).
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const QuadratureOptions& options = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>> {
  using Value = std::decay_t<decltype(f(a))>;
  using Interval = detail::Interval<Value>;
  auto worse = [](const Interval& lhs, const Interval& rhs) { return lhs.error < rhs.error; };
  std::priority_queue<Interval, std::vector<Interval>, decltype(worse)> queue(worse);

  const std::size_t panels = std::max<std::size_t>(1, options.initial_panels);
  compensated_sum error_total;
  compensated_sum l1_total;
  for (std::size_t i = 0; i < panels; ++i) {
    const double lo = a + (b - a) * static_cast<double>(i) / static_cast<double>(panels);
    const double hi = i + 1 == panels ? b : a + (b - a) * static_cast<double>(i + 1) / static_cast<double>(panels);
    auto piece = detail::gauss_kronrod_61(f, lo, hi);
    error_total += piece.error;
    l1_total += piece.l1;
    queue.push(piece);
  }

  auto target = [&] {
    const double l1 = l1_total.value();
    return std::max({options.abs_tol, options.rel_tol * l1,
                     50.0 * std::numeric_limits<double>::epsilon() * l1});
  };

  while (error_total.value() > target()) {
    if (queue.size() >= options.max_intervals) {
      throw numerical_failure("adaptive quadrature did not converge within " +
                                  std::to_string(options.max_intervals) + " intervals",
                              error_total.value());
    }
    const Interval worst = queue.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      throw numerical_failure("adaptive quadrature interval collapsed", error_total.value());
    }
    queue.pop();
    auto left = detail::gauss_kronrod_61(f, worst.a, mid);
    auto right = detail::gauss_kronrod_61(f, mid, worst.b);
    error_total += left.error + right.error - worst.error;
    l1_total += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }

  std::vector<Interval> pieces;
  pieces.reserve(queue.size());
  while (!queue.empty()) {
    pieces.push_back(queue.top());
    queue.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Interval& l, const Interval& r) { return l.a < r.a; });

  QuadratureResult<Value> result{Value{}, 0.0, 0.0, pieces.size()};
  compensated_sum err;
  compensated_sum l1;
  if constexpr (std::is_same_v<Value, double>) {
    compensated_sum acc;
    for (const auto& p : pieces) acc += p.value;
    result.value = acc.value();
  } else {
    compensated_complex_sum acc;
    for (const auto& p : pieces) acc += p.value;
    result.value = acc.value();
  }
  for (const auto& p : pieces) {
    err += p.error;
    l1 += p.l1;
  }
  result.error = err.value();
  result.l1 = l1.value();
  return result;
}

}  // namespace resonance
