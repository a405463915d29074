#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "resonance/bump.hpp"
#include "resonance/dirichlet.hpp"
#include "resonance/errors.hpp"
#include "resonance/multfn.hpp"
#include "resonance/ntcore.hpp"
#include "resonance/quadrature.hpp"
#include "resonance/resonator.hpp"
#include "resonance/summation.hpp"

namespace resonance {

inline constexpr std::uint64_t kDefaultBudgetTerms = 100'000'000;
inline constexpr std::uint64_t kDefaultExactBudget = 4'000'000;

/// Explicit nonnegative coefficients r(n) on a finite set of integers.
/// `squarefree_multiplicative` promises r is multiplicative and vanishes off
/// squarefree integers, which the diagonal routines assert against.
struct SupportCoefficients {
  std::vector<std::uint64_t> n;
  std::vector<double> r;
  bool squarefree_multiplicative = false;

  double at(std::uint64_t k) const {
    const auto it = std::lower_bound(n.begin(), n.end(), k);
    return (it != n.end() && *it == k) ? r[static_cast<std::size_t>(it - n.begin())] : 0.0;
  }
};

inline SupportCoefficients coefficients_of(const SupportSet& support) {
  SupportCoefficients out;
  out.squarefree_multiplicative = true;
  for (const auto& e : support) {
    out.n.push_back(e.n);
    out.r.push_back(e.r);
  }
  return out;
}

namespace detail {

inline void check_budget(double work, std::uint64_t budget, const std::string& what) {
  if (work > static_cast<double>(budget)) {
    throw resource_limit_error(what + " needs " + std::to_string(static_cast<std::uint64_t>(work)) +
                                   " term evaluations, over the budget of " + std::to_string(budget),
                               work);
  }
}

inline double real_part_checked(std::complex<double> value, double magnitude, const char* what) {
  if (std::abs(value.imag()) > 1e-10 * std::max(1.0, magnitude)) {
    throw numerical_failure(std::string(what) + " left an imaginary residue", std::abs(value.imag()));
  }
  return value.real();
}

inline std::size_t oscillation_panels(double length, double max_frequency) {
  return 1 + static_cast<std::size_t>(std::ceil(length * max_frequency / (4.0 * std::numbers::pi)));
}

}  // namespace detail

/// int |R(t)|^2 Phi(t/T) (|D_N(t)|^2 if dn is given) dt over [T/2, T].
inline QuadratureResult<double> weighted_moment_quadrature(const DirichletPolynomial& resonator,
                                                           const DirichletPolynomial* dn, double T,
                                                           double rel_tol = 1e-8,
                                                           std::size_t max_intervals = 2'000'000) {
  if (!(T > 0.0)) throw std::invalid_argument("T must be positive");
  const auto& freqs = resonator.frequencies();
  double max_frequency = freqs.empty() ? 0.0 : std::log(static_cast<double>(freqs.back()));
  if (dn != nullptr && !dn->frequencies().empty()) {
    max_frequency += std::log(static_cast<double>(dn->frequencies().back()));
  }
  QuadratureOptions options;
  options.rel_tol = rel_tol;
  options.initial_panels = detail::oscillation_panels(0.5 * T, max_frequency);
  options.max_intervals = std::max(max_intervals, 4 * options.initial_panels);
  return integrate_adaptive(
      [&](double t) {
        double value = std::norm(resonator(t)) * Bump::phi(t / T);
        if (dn != nullptr && value != 0.0) value *= std::norm((*dn)(t));
        return value;
      },
      0.5 * T, T, options);
}

inline double m1_quadrature(const UnimodularCMF& f, double T, const SupportSet& support, double rel_tol = 1e-8) {
  const auto resonator = make_resonator_polynomial(f, support);
  return weighted_moment_quadrature(resonator, nullptr, T, rel_tol).value;
}

inline double m2_quadrature(const UnimodularCMF& f, std::uint64_t N, double T, const SupportSet& support,
                            const FactorTable& table, double rel_tol = 1e-8) {
  const auto resonator = make_resonator_polynomial(f, support);
  const auto dn = make_dirichlet(f, N, table);
  return weighted_moment_quadrature(resonator, &dn, T, rel_tol).value;
}

/// M1 = T sum_{a,b} c_a conj(c_b) hat(-T log(a/b)) with c_a = f(a) r(a).
inline double m1_exact(const UnimodularCMF& f, double T, const SupportSet& support, const Bump& bump,
                       std::uint64_t budget = kDefaultExactBudget) {
  const double size = static_cast<double>(support.size());
  detail::check_budget(size * size, budget, "m1_exact");
  std::vector<std::complex<double>> c;
  for (const auto& e : support) c.push_back(support_value(f, support, e) * e.r);
  compensated_complex_sum acc;
  compensated_sum magnitude;
  for (std::size_t i = 0; i < support.size(); ++i) {
    for (std::size_t j = 0; j < support.size(); ++j) {
      const double xi = -T * log_ratio(support[i].n, support[j].n);
      const auto term = c[i] * std::conj(c[j]) * bump.hat(xi);
      acc += term;
      magnitude += std::abs(term);
    }
  }
  return T * detail::real_part_checked(acc.value(), magnitude.value(), "m1_exact");
}

/// M1 main term T hat(0) sum r(n)^2 over the support; free of f since |f| = 1.
inline double m1_main(double T, const SupportSet& support, const Bump& bump) {
  compensated_sum acc;
  for (const auto& e : support) acc += e.r * e.r;
  return T * bump.hat_at_zero() * acc.value();
}

/// M2 = (T/N) sum_{a,b <= X} sum_{m,n <= N} c_a conj(c_b) f(n) conj(f(m)) hat(-T log(an/(bm))).
inline double m2_exact(const UnimodularCMF& f, std::uint64_t N, double T, const SupportSet& support,
                       const FactorTable& table, const Bump& bump, std::uint64_t budget = kDefaultExactBudget) {
  const double terms = static_cast<double>(N) * static_cast<double>(support.size());
  detail::check_budget(terms * terms, budget, "m2_exact");
  const auto fv = f.values_up_to(N, table);
  struct Term {
    std::uint64_t product;
    std::complex<double> coeff;
  };
  std::vector<Term> combined;
  for (const auto& e : support) {
    const auto ca = support_value(f, support, e) * e.r;
    for (std::uint64_t n = 1; n <= N; ++n) {
      if (e.n > std::numeric_limits<std::uint64_t>::max() / n) {
        throw resource_limit_error("a*n exceeds the 64-bit range in m2_exact");
      }
      combined.push_back({e.n * n, ca * fv[n]});
    }
  }
  compensated_complex_sum acc;
  compensated_sum magnitude;
  for (const auto& lhs : combined) {
    for (const auto& rhs : combined) {
      const double xi = -T * log_ratio(lhs.product, rhs.product);
      const auto term = lhs.coeff * std::conj(rhs.coeff) * bump.hat(xi);
      acc += term;
      magnitude += std::abs(term);
    }
  }
  return (T / static_cast<double>(N)) * detail::real_part_checked(acc.value(), magnitude.value(), "m2_exact");
}

/// Exact sum over m, n <= N and a, b <= X with ma = nb of r(a) r(b).
///
/// With g = (a, b), a = a'g, b = b'g the condition forces m = h b', n = h a'
/// for h = (m, n), so each pair (a, b) contributes floor(N / max(a', b')).
inline double diagonal_sum(const SupportCoefficients& coeffs, std::uint64_t N, double X,
                           std::uint64_t budget = kDefaultBudgetTerms) {
  if (N == 0) throw std::invalid_argument("N must be positive");
  std::size_t count = 0;
  while (count < coeffs.n.size() && static_cast<double>(coeffs.n[count]) <= X) ++count;
  detail::check_budget(static_cast<double>(count) * static_cast<double>(count), budget, "diagonal_sum");
  compensated_sum acc;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t a = coeffs.n[i];
    for (std::size_t j = 0; j < count; ++j) {
      const std::uint64_t b = coeffs.n[j];
      const std::uint64_t g = std::gcd(a, b);
      const std::uint64_t a1 = a / g;
      const std::uint64_t b1 = b / g;
      const std::uint64_t widest = std::max(a1, b1);
      if (widest > N) continue;
      if (coeffs.squarefree_multiplicative && (std::gcd(g, a1) != 1 || std::gcd(g, b1) != 1)) {
        throw std::logic_error("squarefree support produced a gcd sharing primes with a'b'");
      }
      acc += coeffs.r[i] * coeffs.r[j] * static_cast<double>(N / widest);
    }
  }
  return acc.value();
}

/// The restricted sum bounding the diagonal from below: coprime a', b' <= min(X, N),
/// g <= X / max(a', b') with (g, a'b') = 1, weight r(a') r(b') r(g)^2 floor(N / max(a', b')).
inline double paper_diagonal_lower_bound(const SupportCoefficients& coeffs, std::uint64_t N, double X,
                                         std::uint64_t budget = kDefaultBudgetTerms) {
  if (N == 0) throw std::invalid_argument("N must be positive");
  const double z = std::min(X, static_cast<double>(N));
  std::size_t count_z = 0;
  while (count_z < coeffs.n.size() && static_cast<double>(coeffs.n[count_z]) <= z) ++count_z;
  std::size_t count_x = 0;
  while (count_x < coeffs.n.size() && static_cast<double>(coeffs.n[count_x]) <= X) ++count_x;
  detail::check_budget(static_cast<double>(count_z) * static_cast<double>(count_z) * static_cast<double>(count_x),
                       budget, "paper_diagonal_lower_bound");
  compensated_sum acc;
  for (std::size_t i = 0; i < count_z; ++i) {
    const std::uint64_t a1 = coeffs.n[i];
    for (std::size_t j = 0; j < count_z; ++j) {
      const std::uint64_t b1 = coeffs.n[j];
      if (std::gcd(a1, b1) != 1) continue;
      const std::uint64_t widest = std::max(a1, b1);
      const double g_cap = X / static_cast<double>(widest);
      compensated_sum inner;
      for (std::size_t k = 0; k < count_x && static_cast<double>(coeffs.n[k]) <= g_cap; ++k) {
        const std::uint64_t g = coeffs.n[k];
        if (std::gcd(g, a1) != 1 || std::gcd(g, b1) != 1) continue;
        inner += coeffs.r[k] * coeffs.r[k];
      }
      acc += coeffs.r[i] * coeffs.r[j] * inner.value() * static_cast<double>(N / widest);
    }
  }
  return acc.value();
}

/// Smallest |log(ma / nb)| > 0 over m, n <= N and a, b <= X (integers); +inf if none.
inline double min_offdiag_gap(std::uint64_t N, std::uint64_t X, std::uint64_t budget = 50'000'000) {
  if (N == 0 || X == 0) throw std::invalid_argument("N and X must be positive");
  detail::check_budget(static_cast<double>(N) * static_cast<double>(X), budget, "min_offdiag_gap");
  std::vector<std::uint64_t> products;
  products.reserve(N * X);
  for (std::uint64_t m = 1; m <= N; ++m) {
    for (std::uint64_t a = 1; a <= X; ++a) products.push_back(m * a);
  }
  std::sort(products.begin(), products.end());
  products.erase(std::unique(products.begin(), products.end()), products.end());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < products.size(); ++i) gap = std::min(gap, log_ratio(products[i], products[i - 1]));
  return gap;
}

struct OffDiagonalBound {
  double m2_bound;     // bound on |off-diagonal part of M2|
  double m1_bound;     // bound on |off-diagonal part of M1|
  double xi_min;       // T / (N X), floor for T |log(ma/nb)| when ma != nb
  double xi_min_m1;    // T / X, floor for T |log(a/b)| when a != b
  double c_nu;         // empirical max |hat(xi)| xi^nu over the decay grid
  int nu;
  double xi_floor;  // T^{delta/6}
};

/// |hat(xi)| <= min(hat(0), C_nu xi^-nu) for xi >= 1 (C_nu measured on a grid).
inline double hat_envelope(const Bump& bump, double c_nu, int nu, double xi) {
  const double cap = bump.hat_at_zero();
  if (!(xi >= 1.0)) return cap;
  return std::min(cap, c_nu * std::pow(xi, -static_cast<double>(nu)));
}

/// Bounds the terms with ma != nb:
///   (T/N) N^2 (sum_{a <= X} r(a))^2 min(hat(0), C_nu (T/(N X))^-nu),
/// using that every such term has T |log(ma/nb)| >= T/(N X). The M1 analogue
/// uses T |log(a/b)| >= T/X. The constant C_nu is empirical.
inline OffDiagonalBound offdiag_bound(double sum_r, double sum_r_squared, std::uint64_t N, double X, double T,
                                      double delta, int nu, const Bump& bump,
                                      std::span<const double> xi_grid) {
  if (nu < 2) throw std::invalid_argument("offdiag_bound needs nu >= 2");
  OffDiagonalBound out{};
  out.nu = nu;
  out.c_nu = bump.decay_constant(nu, xi_grid);
  out.xi_min = T / (static_cast<double>(N) * X);
  out.xi_min_m1 = T / X;
  out.xi_floor = std::pow(T, delta / 6.0);
  const double Nd = static_cast<double>(N);
  out.m2_bound = (T / Nd) * Nd * Nd * sum_r * sum_r * hat_envelope(bump, out.c_nu, nu, out.xi_min);
  out.m1_bound = T * std::max(0.0, sum_r * sum_r - sum_r_squared) * hat_envelope(bump, out.c_nu, nu, out.xi_min_m1);
  return out;
}

/// Main term: sum over coprime a', b' in the support of
///   r(a') r(b') a'b' / max(a', b')^3 / prod_{p | a'b'} (1 + r(p)^2),
/// checked against the equal t-weighted form t(a') t(b') a'b' / max^3.
inline double hough_main_term(const Resonator& res, const SupportSet& support_z,
                              std::uint64_t budget = kDefaultBudgetTerms) {
  const double size = static_cast<double>(support_z.size());
  detail::check_budget(size * size, budget, "hough_main_term");
  std::vector<double> euler;
  for (const auto& e : support_z) {
    double prod = 1.0;
    for (const auto p : support_z.primes_of(e)) {
      const double r = res.r_at_prime(p);
      prod *= 1.0 + r * r;
    }
    euler.push_back(prod);
  }
  compensated_sum r_form;
  compensated_sum t_form;
  for (std::size_t i = 0; i < support_z.size(); ++i) {
    for (std::size_t j = 0; j < support_z.size(); ++j) {
      const auto a = support_z[i].n;
      const auto b = support_z[j].n;
      if (std::gcd(a, b) != 1) continue;
      const double lo = static_cast<double>(std::min(a, b));
      const double hi = static_cast<double>(std::max(a, b));
      const double shape = lo / (hi * hi);
      r_form += support_z[i].r * support_z[j].r * shape / (euler[i] * euler[j]);
      t_form += support_z[i].t * support_z[j].t * shape;
    }
  }
  if (std::abs(r_form.value() - t_form.value()) > 1e-12 * std::abs(t_form.value())) {
    throw numerical_failure("r-weighted and t-weighted main terms disagree",
                            std::abs(r_form.value() - t_form.value()));
  }
  return r_form.value();
}

/// Rankin error term
///   E = prod_p (1 + r(p)^2)^-1 X^-alpha sum_{(a',b')=1, <= z} r(a') r(b') (a'b')^{alpha - 1/2}
///       prod_{p not | a'b'} (1 + r(p)^2 p^alpha),
/// the inner g-sum taken in closed form as an Euler product. Evaluated in log space.
inline double rankin_error_term(const Resonator& res, const SupportSet& support_z, double alpha,
                                std::uint64_t budget = kDefaultBudgetTerms) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::invalid_argument("rankin alpha must lie in (0, 1/2)");
  const double size = static_cast<double>(support_z.size());
  detail::check_budget(size * size, budget, "rankin_error_term");
  const double log_prefactor = -res.log_euler_product(0.0) - alpha * res.log_length();
  const double log_full = res.log_euler_product(alpha);
  std::vector<double> log_removed;
  for (const auto& e : support_z) {
    compensated_sum acc;
    for (const auto p : support_z.primes_of(e)) {
      const double r = res.r_at_prime(p);
      acc += std::log1p(r * r * std::pow(static_cast<double>(p), alpha));
    }
    log_removed.push_back(acc.value());
  }
  compensated_sum total;
  for (std::size_t i = 0; i < support_z.size(); ++i) {
    for (std::size_t j = 0; j < support_z.size(); ++j) {
      const auto& a = support_z[i];
      const auto& b = support_z[j];
      if (std::gcd(a.n, b.n) != 1) continue;
      const double log_term = log_prefactor + log_full - log_removed[i] - log_removed[j] +
                              std::log(a.r) + std::log(b.r) + (alpha - 0.5) * (a.log_n + b.log_n);
      total += std::exp(log_term);
    }
  }
  return total.value();
}

struct RankinTailCheck {
  double exact_tail;
  double rankin_bound;
  bool holds;
};

/// Tail sum_{g > cap, (g, k) = 1} r(g)^2 against cap^-alpha prod_{p not | k} (1 + r(p)^2 p^alpha).
inline RankinTailCheck rankin_tail_identity_check(const Resonator& res, std::span<const std::uint64_t> k_primes,
                                                  double cap, double alpha,
                                                  std::size_t budget = kDefaultSupportBudget) {
  if (!(alpha > 0.0)) throw std::invalid_argument("rankin alpha must be positive");
  if (!(cap >= 1.0)) throw std::invalid_argument("tail cap must be >= 1");
  RankinTailCheck out{};
  try {
    const auto full = res.support(1e300, budget, k_primes);
    compensated_sum tail;
    for (const auto& e : full) {
      if (static_cast<double>(e.n) > cap) tail += e.r * e.r;
    }
    out.exact_tail = tail.value();
  } catch (const resource_limit_error&) {
    compensated_sum head;
    for (const auto& e : res.support(cap, budget, k_primes)) head += e.r * e.r;
    out.exact_tail = std::max(0.0, std::exp(res.log_euler_product(0.0, k_primes)) - head.value());
  }
  out.rankin_bound = std::exp(-alpha * std::log(cap) + res.log_euler_product(alpha, k_primes));
  out.holds = out.exact_tail <= out.rankin_bound;
  return out;
}

inline RankinTailCheck rankin_tail_identity_check(const Resonator& res, std::uint64_t k, double cap, double alpha,
                                                  const FactorTable& table,
                                                  std::size_t budget = kDefaultSupportBudget) {
  std::vector<std::uint64_t> primes;
  for (const auto& pp : table.factorize(k)) primes.push_back(pp.prime);
  return rankin_tail_identity_check(res, primes, cap, alpha, budget);
}

struct Lemma45Check {
  double lhs;
  double rhs;
  double z;
};

/// lhs = sum_{coprime m1, m2 <= z} t(m1) t(m2) m1 m2 / max(m1, m2)^3,
/// rhs = (sum_{m <= z} t(m) / sqrt(m))^2 / log z.
inline Lemma45Check lemma45_check(const Resonator& res, double z, std::size_t support_budget = kDefaultSupportBudget,
                                  std::uint64_t budget = kDefaultBudgetTerms) {
  if (!(z > 1.0)) throw std::invalid_argument("lemma45_check needs z > 1");
  const auto support = res.support(z, support_budget);
  const double size = static_cast<double>(support.size());
  detail::check_budget(size * size, budget, "lemma45_check");
  compensated_sum lhs;
  compensated_sum linear;
  for (const auto& a : support) {
    linear += a.t / std::sqrt(static_cast<double>(a.n));
    for (const auto& b : support) {
      if (std::gcd(a.n, b.n) != 1) continue;
      const double lo = static_cast<double>(std::min(a.n, b.n));
      const double hi = static_cast<double>(std::max(a.n, b.n));
      lhs += a.t * b.t * lo / (hi * hi);
    }
  }
  return {lhs.value(), linear.value() * linear.value() / std::log(z), z};
}

}  // namespace resonance
