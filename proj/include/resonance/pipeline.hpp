#pragma once

#include <chrono>
#include <numbers>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "resonance/bump.hpp"
#include "resonance/dirichlet.hpp"
#include "resonance/errors.hpp"
#include "resonance/moments.hpp"
#include "resonance/multfn.hpp"
#include "resonance/ntcore.hpp"
#include "resonance/oracle.hpp"
#include "resonance/report.hpp"
#include "resonance/resonator.hpp"

namespace resonance {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// Everything that defines a run. `out` and `trace_out` only say where results
/// go, so they are left out of the embedded config and of its hash.
struct RunConfig {
  std::uint64_t n = 1000;
  double delta = 0.5;
  double gamma = 0.5;
  std::optional<double> c;
  std::optional<double> t;
  std::optional<double> log_x;
  std::string f = "steinhaus";
  std::uint64_t seed = 0;
  std::optional<double> eps;
  int nu = 3;
  std::optional<double> alpha;
  std::uint64_t budget_terms = kDefaultBudgetTerms;
  std::uint64_t exact_budget = kDefaultExactBudget;
  std::uint64_t support_budget = kDefaultSupportBudget;
  std::uint64_t sieve_limit = kDefaultSieveLimit;
  std::string format = "json";
  std::uint64_t trace_stride = 0;
  std::optional<double> scan_lo;
  std::optional<double> scan_hi;
  bool guided = false;
  // oracle subcommand
  std::string check = "diagonal";
  std::optional<std::uint64_t> x;
  std::map<std::uint64_t, double> toy;
  // sweep subcommand
  std::vector<std::uint64_t> sweep_n;
  std::vector<double> sweep_c;
  std::vector<double> sweep_delta;
  std::vector<std::uint64_t> sweep_seed;

  std::string out;
  std::string trace_out;
};

class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

template <class T>
nlohmann::ordered_json optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

template <class T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& target) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    target.reset();
    return;
  }
  target = it->get<T>();
}

template <class T>
void read_value(const nlohmann::json& j, const char* key, T& target) {
  const auto it = j.find(key);
  if (it != j.end() && !it->is_null()) target = it->get<T>();
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const RunConfig& c) {
  using detail::optional_json;
  nlohmann::ordered_json j;
  j["n"] = c.n;
  j["delta"] = c.delta;
  j["gamma"] = c.gamma;
  j["c"] = optional_json(c.c);
  j["t"] = optional_json(c.t);
  j["log_x"] = optional_json(c.log_x);
  j["f"] = c.f;
  j["seed"] = c.seed;
  j["eps"] = optional_json(c.eps);
  j["nu"] = c.nu;
  j["alpha"] = optional_json(c.alpha);
  j["budget_terms"] = c.budget_terms;
  j["exact_budget"] = c.exact_budget;
  j["support_budget"] = c.support_budget;
  j["sieve_limit"] = c.sieve_limit;
  j["format"] = c.format;
  j["trace_stride"] = c.trace_stride;
  j["scan_lo"] = optional_json(c.scan_lo);
  j["scan_hi"] = optional_json(c.scan_hi);
  j["guided"] = c.guided;
  j["check"] = c.check;
  j["x"] = optional_json(c.x);
  nlohmann::ordered_json toy = nlohmann::ordered_json::object();
  for (const auto& [n, r] : c.toy) toy[std::to_string(n)] = r;
  j["toy"] = toy;
  j["sweep_n"] = c.sweep_n;
  j["sweep_c"] = c.sweep_c;
  j["sweep_delta"] = c.sweep_delta;
  j["sweep_seed"] = c.sweep_seed;
  return j;
}

/// Reads a flat config object. A full report is accepted too: its embedded
/// "config" is used, so any report can be replayed directly.
inline RunConfig config_from_json(const nlohmann::json& input) {
  const nlohmann::json& j = input.contains("config") && input["config"].is_object() ? input["config"] : input;
  if (!j.is_object()) throw usage_error("config must be a JSON object");
  static const std::vector<std::string> known = {
      "n", "delta", "gamma", "c", "t", "log_x", "f", "seed", "eps", "nu", "alpha", "budget_terms", "exact_budget",
      "support_budget", "sieve_limit", "format", "trace_stride", "scan_lo", "scan_hi", "guided", "check", "x", "toy",
      "sweep_n", "sweep_c", "sweep_delta", "sweep_seed", "out", "trace_out"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw usage_error("unknown config field '" + item.key() + "'");
    }
  }
  RunConfig c;
  try {
    detail::read_value(j, "n", c.n);
    detail::read_value(j, "delta", c.delta);
    detail::read_value(j, "gamma", c.gamma);
    detail::read_optional(j, "c", c.c);
    detail::read_optional(j, "t", c.t);
    detail::read_optional(j, "log_x", c.log_x);
    detail::read_value(j, "f", c.f);
    detail::read_value(j, "seed", c.seed);
    detail::read_optional(j, "eps", c.eps);
    detail::read_value(j, "nu", c.nu);
    detail::read_optional(j, "alpha", c.alpha);
    detail::read_value(j, "budget_terms", c.budget_terms);
    detail::read_value(j, "exact_budget", c.exact_budget);
    detail::read_value(j, "support_budget", c.support_budget);
    detail::read_value(j, "sieve_limit", c.sieve_limit);
    detail::read_value(j, "format", c.format);
    detail::read_value(j, "trace_stride", c.trace_stride);
    detail::read_optional(j, "scan_lo", c.scan_lo);
    detail::read_optional(j, "scan_hi", c.scan_hi);
    detail::read_value(j, "guided", c.guided);
    detail::read_value(j, "check", c.check);
    detail::read_optional(j, "x", c.x);
    if (const auto it = j.find("toy"); it != j.end() && it->is_object()) {
      for (const auto& item : it->items()) c.toy[std::stoull(item.key())] = item.value().get<double>();
    }
    detail::read_value(j, "sweep_n", c.sweep_n);
    detail::read_value(j, "sweep_c", c.sweep_c);
    detail::read_value(j, "sweep_delta", c.sweep_delta);
    detail::read_value(j, "sweep_seed", c.sweep_seed);
    detail::read_value(j, "out", c.out);
    detail::read_value(j, "trace_out", c.trace_out);
  } catch (const nlohmann::json::exception& e) {
    throw usage_error(std::string("bad config value: ") + e.what());
  }
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read config file " + path);
  try {
    return config_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw usage_error("config file " + path + " is not valid JSON: " + e.what());
  }
}

/// FNV-1a 64 of the compact canonical config JSON, as 16 hex digits.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char ch : to_json(c).dump()) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Parses "one", "arch:ALPHA" or "steinhaus".
inline UnimodularCMF make_cmf(const std::string& spec, std::uint64_t seed, std::uint64_t prime_limit) {
  if (spec == "one") return UnimodularCMF::constant_one();
  if (spec == "steinhaus") return UnimodularCMF::steinhaus(seed, prime_limit);
  if (spec.rfind("arch:", 0) == 0) {
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(spec.substr(5), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != spec.size() - 5 || !std::isfinite(alpha)) {
      throw usage_error("bad archimedean parameter in --f " + spec);
    }
    return UnimodularCMF::archimedean(alpha);
  }
  throw usage_error("--f must be one of: one, arch:ALPHA, steinhaus (got '" + spec + "')");
}

struct Scale {
  double log_T;
  double T;
  std::optional<double> C;
  double log_X;
  double X;
};

inline void validate(const RunConfig& c) {
  if (c.n < 1) throw usage_error("N must be a positive integer");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw usage_error("delta must lie in (0, 1)");
  if (!(c.gamma > 0.0 && c.gamma < 1.0)) throw usage_error("gamma must lie in (0, 1)");
  if (c.c.has_value() == c.t.has_value()) throw usage_error("give exactly one of C (T = N^C) or T");
  if (c.c && !(*c.c >= 0.0 && std::isfinite(*c.c))) throw usage_error("C must be a finite nonnegative number");
  if (c.t && !(*c.t >= 1.0 && std::isfinite(*c.t))) throw usage_error("T must be finite and >= 1");
  if (c.log_x && !(*c.log_x >= 0.0 && std::isfinite(*c.log_x))) throw usage_error("log X must be finite and >= 0");
  if (c.eps && !(*c.eps > 0.0)) throw usage_error("eps must be positive");
  if (c.nu < 2 || c.nu > 20) throw usage_error("nu must lie in [2, 20]");
  if (c.alpha && !(*c.alpha > 0.0 && *c.alpha < 0.5)) throw usage_error("alpha must lie in (0, 1/2)");
  if (c.format != "json" && c.format != "csv") throw usage_error("format must be json or csv");
  if (c.budget_terms == 0 || c.support_budget == 0) throw usage_error("budgets must be positive");
  if ((c.scan_lo.has_value() != c.scan_hi.has_value()) || (c.scan_lo && !(*c.scan_lo <= *c.scan_hi))) {
    throw usage_error("scan window needs both ends with lo <= hi");
  }
  for (const auto& [n, r] : c.toy) {
    if (n == 0 || !(r >= 0.0) || !std::isfinite(r)) throw usage_error("toy resonator needs n >= 1 and finite r >= 0");
  }
  make_cmf(c.f, c.seed, 2);
}

inline Scale resolve_scale(const RunConfig& c) {
  Scale s{};
  const double log_n = std::log(static_cast<double>(c.n));
  s.log_T = c.c ? *c.c * log_n : std::log(*c.t);
  if (s.log_T > 700.0) throw usage_error("T is too large for double precision (log T > 700)");
  s.T = std::exp(s.log_T);
  if (c.c) {
    s.C = *c.c;
  } else if (c.n > 1) {
    s.C = s.log_T / log_n;
  }
  s.log_X = c.log_x ? *c.log_x : (1.0 - 2.0 * c.delta / 3.0) * s.log_T;
  s.X = std::exp(std::min(s.log_X, 690.0));
  return s;
}

/// Sieve large enough for n <= N and the whole prime window.
inline FactorTable table_for(const RunConfig& c, const Scale& s) {
  double need = std::max(2.0, static_cast<double>(c.n));
  if (s.log_X >= Resonator::kMinLogLength) {
    const auto [lo, hi] = Resonator::window_for(s.log_X);
    if (lo <= hi) need = std::max(need, std::floor(hi));
  }
  if (need > static_cast<double>(c.sieve_limit)) {
    throw resource_limit_error("run needs primes up to " + std::to_string(need) + ", over the sieve limit " +
                                   std::to_string(c.sieve_limit),
                               need);
  }
  return FactorTable(static_cast<std::uint64_t>(need));
}

inline Resonator resonator_for(const Scale& s, const FactorTable& table) {
  if (s.log_X >= Resonator::kMinLogLength) return Resonator::from_log_length(s.log_X, table);
  return Resonator::degenerate(s.log_X);
}

inline std::uint64_t isqrt(std::uint64_t v) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

/// Resonator support up to X, truncated to at most sqrt(budget_terms) integers
/// when the full set would not fit the pair budget.
inline SupportSet support_for(const Resonator& res, const RunConfig& c, const Scale& s, bool& truncated) {
  const std::size_t limit = std::max<std::uint64_t>(1, isqrt(c.budget_terms));
  double cap = std::max(1.0, s.X);
  // Counting stays below 2^63; if that alone overflows the budget the cap drops anyway.
  const double count_cap = std::min(cap, 9.2e18);
  truncated = false;
  if (res.count_support(count_cap, limit) > limit) {
    cap = res.largest_cap_within(limit, count_cap);
    truncated = true;
  }
  auto support = res.support(cap, c.support_budget);
  return support;
}

template <class F>
std::optional<double> within_budget(F&& compute) {
  try {
    return compute();
  } catch (const resource_limit_error&) {
    return std::nullopt;
  } catch (const numerical_failure&) {
    return std::nullopt;
  }
}

inline MomentReport certify(const RunConfig& config) {
  validate(config);
  const Scale scale = resolve_scale(config);
  const std::uint64_t N = config.n;
  const FactorTable table = table_for(config, scale);
  const Resonator res = resonator_for(scale, table);

  MomentReport rep;
  rep.N = N;
  rep.T = scale.T;
  rep.log_T = scale.log_T;
  rep.X = scale.X;
  rep.log_X = scale.log_X;
  rep.C = scale.C;
  rep.delta = config.delta;
  rep.gamma = config.gamma;
  rep.nu = config.nu;
  rep.lambda = res.lambda();
  rep.support_lo = res.support_lo();
  rep.support_hi = res.support_hi();
  rep.prime_count = res.primes().size();
  rep.resonator_degenerate = res.degenerate();

  const SupportSet support = support_for(res, config, scale, rep.support_truncated);
  const double cap = std::min(scale.X, support.cap());
  rep.support_cap = cap;
  rep.support_size = support.size();
  compensated_sum sum_r;
  compensated_sum sum_r2;
  for (const auto& e : support) {
    sum_r += e.r;
    sum_r2 += e.r * e.r;
  }
  rep.sum_r = sum_r.value();
  rep.sum_r_squared = sum_r2.value();
  rep.log_euler_product = res.log_euler_product();

  const Bump bump;
  rep.phi_hat0 = bump.hat_at_zero();
  const auto coeffs = coefficients_of(support);
  rep.diag_sum = diagonal_sum(coeffs, N, cap, config.budget_terms);
  rep.m1_main = m1_main(scale.T, support, bump);
  const auto grid = default_decay_grid();
  const auto od = offdiag_bound(rep.sum_r, rep.sum_r_squared, N, std::max(1.0, cap), scale.T, config.delta,
                                config.nu, bump, grid);
  rep.offdiag_bound = od.m2_bound;
  rep.m1_offdiag_bound = od.m1_bound;
  rep.c_nu = od.c_nu;
  rep.xi_min = od.xi_min;
  rep.xi_floor = od.xi_floor;
  rep.coarse_diag_lower_bound =
      within_budget([&] { return paper_diagonal_lower_bound(coeffs, N, cap, config.budget_terms); });
  const double gap_cells = static_cast<double>(N) * std::floor(cap);
  if (gap_cells <= 1e6) {
    rep.min_offdiag_gap = min_offdiag_gap(N, static_cast<std::uint64_t>(std::floor(cap)));
  }

  const double z = std::min(scale.X, static_cast<double>(N));
  if (z > 1.0) {
    const double z_eff = std::min(z, cap);
    rep.main_terms_truncated = z > cap;
    rep.lemma45_z = z_eff;
    if (z_eff > 1.0) {
      const auto support_z = res.support(z_eff, config.support_budget);
      rep.hough_main = within_budget([&] { return hough_main_term(res, support_z, config.budget_terms); });
      const double alpha = config.alpha.value_or(res.alpha_default());
      if (alpha > 0.0 && alpha < 0.5) {
        rep.rankin_alpha = alpha;
        rep.rankin_error =
            within_budget([&] { return rankin_error_term(res, support_z, alpha, config.budget_terms); });
      }
      try {
        const auto lemma = lemma45_check(res, z_eff, config.support_budget, config.budget_terms);
        rep.lemma45_lhs = lemma.lhs;
        rep.lemma45_rhs = lemma.rhs;
      } catch (const resource_limit_error&) {
      }
    }
  }

  // Direct evaluations of M1 and M2, only for instances small enough to afford them.
  const auto f = make_cmf(config.f, config.seed, table.limit());
  const double log_span = std::log(static_cast<double>(N)) + std::log(static_cast<double>(support.max_integer()));
  const double terms = static_cast<double>(N) * static_cast<double>(support.size());
  // Each transform costs about 1 + xi / (32 pi) quadrature panels.
  const double exact_work = terms * terms * (1.0 + scale.T * log_span / (32.0 * std::numbers::pi));
  if (exact_work <= 2e6 && terms * terms <= static_cast<double>(config.exact_budget)) {
    rep.m1_exact = within_budget([&] { return m1_exact(f, scale.T, support, bump, config.exact_budget); });
    rep.m2_exact = within_budget([&] { return m2_exact(f, N, scale.T, support, table, bump, config.exact_budget); });
  }
  const double quad_work = (scale.T * log_span + scale.T) * (static_cast<double>(N + support.size()));
  if (quad_work <= 2e7) {
    rep.m1_quad = within_budget([&] { return m1_quadrature(f, scale.T, support); });
    rep.m2_quad = within_budget([&] { return m2_quadrature(f, N, scale.T, support, table); });
  }
  return ratio_and_bounds(rep);
}

inline nlohmann::ordered_json envelope(const std::string& command, const RunConfig& config) {
  nlohmann::ordered_json j;
  j["artifact_version"] = kArtifactVersion;
  j["config_hash"] = config_hash(config);
  j["generated_at"] = utc_timestamp();
  j["command"] = command;
  j["config"] = to_json(config);
  return j;
}

inline std::string render_certify(const RunConfig& config, const MomentReport& report) {
  if (config.format == "csv") return csv_header() + "\n" + csv_row(report) + "\n";
  auto j = envelope("certify", config);
  j["report"] = to_json(report);
  return j.dump(2) + "\n";
}

inline std::string cmd_certify(const RunConfig& config) { return render_certify(config, certify(config)); }

inline nlohmann::ordered_json to_json(const SearchResult& r) {
  nlohmann::ordered_json j;
  j["t_star"] = detail::number(r.t_star);
  j["value"] = detail::number(r.value);
  j["grid_step"] = detail::number(r.grid_step);
  j["grid_points"] = r.grid_points;
  j["refinement_iterations"] = r.refinement_iterations;
  j["certified"] = r.certified;
  j["certified_slack"] = detail::number(r.certified_slack);
  j["window_lo"] = detail::number(r.window_lo);
  j["window_hi"] = detail::number(r.window_hi);
  return j;
}

inline double default_eps(std::uint64_t N) { return 1e-3 * std::sqrt(static_cast<double>(N)); }

inline SearchResult search(const RunConfig& config, std::ostream* trace = nullptr) {
  validate(config);
  const Scale scale = resolve_scale(config);
  const FactorTable table = config.guided ? table_for(config, scale)
                                          : FactorTable(std::max<std::uint64_t>(2, config.n));
  const auto f = make_cmf(config.f, config.seed, table.limit());
  SearchOptions options;
  if (config.scan_lo) options.window = SearchWindow{*config.scan_lo, *config.scan_hi};
  options.budget_terms = config.budget_terms;
  options.trace_stride = config.trace_stride;
  options.trace = trace;
  const double eps = config.eps.value_or(default_eps(config.n));
  if (!config.guided) return grid_sup(f, config.n, scale.T, eps, table, options);
  const Resonator res = resonator_for(scale, table);
  bool truncated = false;
  const auto support = support_for(res, config, scale, truncated);
  return resonance_guided_search(support, f, config.n, scale.T, eps, table, options);
}

inline std::string cmd_search(const RunConfig& config, std::ostream* trace = nullptr) {
  const auto result = search(config, trace);
  auto j = envelope("search", config);
  j["method"] = config.guided ? "resonance_guided" : "grid";
  j["eps"] = config.eps.value_or(default_eps(config.n));
  j["search"] = to_json(result);
  return j.dump(2) + "\n";
}

inline std::string cmd_resonator(const RunConfig& config) {
  validate(config);
  const Scale scale = resolve_scale(config);
  const FactorTable table = table_for(config, scale);
  const Resonator res = resonator_for(scale, table);
  auto j = envelope("resonator", config);
  nlohmann::ordered_json r;
  r["log_X"] = detail::number(scale.log_X);
  r["X"] = detail::number(scale.X);
  r["degenerate"] = res.degenerate();
  r["lambda"] = detail::number(res.lambda());
  r["support_lo"] = detail::number(res.support_lo());
  r["support_hi"] = detail::number(res.support_hi());
  r["alpha_default"] = detail::number(res.alpha_default());
  r["prime_count"] = res.primes().size();
  nlohmann::ordered_json primes = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < res.primes().size(); ++i) {
    primes.push_back({{"p", res.primes()[i]}, {"r", res.r_primes()[i]}, {"t", res.t_primes()[i]}});
  }
  r["primes"] = primes;
  r["log_euler_product"] = detail::number(res.log_euler_product());
  bool truncated = false;
  const auto support = support_for(res, config, scale, truncated);
  r["support_truncated"] = truncated;
  r["support_cap"] = detail::number(std::min(scale.X, support.cap()));
  r["support_size"] = support.size();
  compensated_sum sum_r2;
  for (const auto& e : support) sum_r2 += e.r * e.r;
  r["sum_r_squared"] = detail::number(sum_r2.value());
  if (support.size() <= 1000) r["support"] = support.integers();
  j["resonator"] = r;
  return j.dump(2) + "\n";
}

/// Brute-force cross-checks: diagonal, bijection, gap, m2quad.
inline std::string cmd_oracle(const RunConfig& config) {
  validate(config);
  const std::uint64_t N = config.n;
  auto j = envelope("oracle", config);
  nlohmann::ordered_json o;
  o["check"] = config.check;
  o["N"] = N;
  if (config.check == "diagonal" || config.check == "bijection" || config.check == "gap") {
    if (!config.x) throw usage_error("oracle check '" + config.check + "' needs --x");
    const std::uint64_t X = *config.x;
    if (X < 1) throw usage_error("X must be positive");
    o["X"] = X;
    if (config.check == "diagonal") {
      oracle::ToyResonator toy;
      if (config.toy.empty()) {
        for (std::uint64_t a = 1; a <= X; ++a) toy.values[a] = 1.0;
        toy.multiplicative = toy.squarefree = false;
      } else {
        toy.values = config.toy;
        const FactorTable table(std::max<std::uint64_t>(2, toy.values.rbegin()->first));
        for (const auto& [n, r] : toy.values) {
          if (r != 0.0 && !table.is_squarefree(n)) toy.squarefree = false;
        }
        for (const auto& [a, ra] : toy.values) {
          for (const auto& [b, rb] : toy.values) {
            if (std::gcd(a, b) != 1 || !toy.values.count(a * b)) continue;
            if (std::abs(toy(a * b) - ra * rb) > 1e-12 * std::max(1.0, ra * rb)) toy.multiplicative = false;
          }
        }
      }
      const double brute = oracle::diagonal_sum_bruteforce(toy, N, X);
      const double fast = diagonal_sum(toy.coefficients(), N, static_cast<double>(X), config.budget_terms);
      o["bruteforce"] = brute;
      o["parametrized"] = fast;
      o["relative_difference"] = brute == 0.0 ? std::abs(fast) : std::abs(fast - brute) / std::abs(brute);
    } else if (config.check == "bijection") {
      o["bijection"] = oracle::parametrization_bijection_check(N, X);
    } else {
      const double gap = min_offdiag_gap(N, X);
      o["min_offdiag_gap"] = detail::number(gap);
      o["floor"] = 1.0 / (static_cast<double>(N) * static_cast<double>(X));
      o["holds"] = !(gap < 1.0 / (static_cast<double>(N) * static_cast<double>(X)));
    }
  } else if (config.check == "m2quad") {
    const Scale scale = resolve_scale(config);
    const FactorTable table = table_for(config, scale);
    const Resonator res = resonator_for(scale, table);
    bool truncated = false;
    const auto support = support_for(res, config, scale, truncated);
    const auto f = make_cmf(config.f, config.seed, table.limit());
    const Bump bump;
    o["T"] = scale.T;
    o["support_size"] = support.size();
    o["m2_bruteforce"] = oracle::m2_bruteforce_quadrature(f, N, scale.T, support, table);
    o["m2_quad"] = detail::number(within_budget([&] { return m2_quadrature(f, N, scale.T, support, table); }));
    o["m2_exact"] = detail::number(
        within_budget([&] { return m2_exact(f, N, scale.T, support, table, bump, config.exact_budget); }));
  } else {
    throw usage_error("oracle check must be diagonal, bijection, gap or m2quad");
  }
  j["oracle"] = o;
  return j.dump(2) + "\n";
}

/// One CSV row per (N, C, delta, seed), in that nesting order.
inline std::string cmd_sweep(const RunConfig& config) {
  const auto ns = config.sweep_n.empty() ? std::vector<std::uint64_t>{config.n} : config.sweep_n;
  std::vector<std::optional<double>> cs;
  if (config.sweep_c.empty()) {
    cs.push_back(config.c);
  } else {
    if (config.t) throw usage_error("sweep over C conflicts with a fixed T");
    for (const double c : config.sweep_c) cs.emplace_back(c);
  }
  const auto deltas = config.sweep_delta.empty() ? std::vector<double>{config.delta} : config.sweep_delta;
  const auto seeds = config.sweep_seed.empty() ? std::vector<std::uint64_t>{config.seed} : config.sweep_seed;
  std::string out = "seed,f," + csv_header() + "\n";
  for (const auto n : ns) {
    for (const auto& c : cs) {
      for (const double delta : deltas) {
        for (const auto seed : seeds) {
          RunConfig row = config;
          row.n = n;
          row.c = c;
          row.delta = delta;
          row.seed = seed;
          out += std::to_string(seed) + "," + row.f + "," + csv_row(certify(row)) + "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace resonance
