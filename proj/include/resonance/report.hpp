#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "resonance/moments.hpp"

namespace resonance {

struct Feasibility {
  bool t_ge_n_pow_2_over_delta = false;        // T >= N^{2/delta}
  bool c_le_log_n_pow_gamma = false;           // C <= (log N)^gamma
  bool log_n_gt_3_lambda_loglog_lambda = false;
  bool log_x_gt_3_lambda_loglog_lambda = false;
  bool window_nonempty = false;
};

/// Every quantity behind one certificate. Optional fields are absent when the
/// corresponding path was outside its budget or undefined for the inputs.
struct MomentReport {
  std::uint64_t N = 1;
  double T = 1.0;
  double log_T = 0.0;
  double X = 1.0;
  double log_X = 0.0;
  std::optional<double> C;
  double delta = 0.5;
  double gamma = 0.5;

  double lambda = 0.0;
  double support_lo = 0.0;
  double support_hi = 0.0;
  std::size_t prime_count = 0;
  std::size_t support_size = 1;
  double support_cap = 1.0;
  bool support_truncated = false;
  bool resonator_degenerate = false;
  double sum_r = 1.0;
  double sum_r_squared = 1.0;
  double log_euler_product = 0.0;
  double phi_hat0 = 0.0;

  std::optional<double> m1_quad;
  std::optional<double> m1_exact;
  double m1_main = 0.0;
  double m1_offdiag_bound = 0.0;
  std::optional<double> m2_quad;
  std::optional<double> m2_exact;
  double diag_sum = 0.0;
  double m2_diag_main = 0.0;
  double offdiag_bound = 0.0;
  std::optional<double> coarse_diag_lower_bound;
  std::optional<double> min_offdiag_gap;
  int nu = 3;
  double c_nu = 0.0;
  double xi_min = 0.0;
  double xi_floor = 0.0;

  double ratio = 1.0;
  double ratio_lower = 0.0;
  double ratio_upper = 0.0;
  double lower_bound = 1.0;
  double bracket_lower_bound = 0.0;

  std::optional<double> hough_main;
  std::optional<double> rankin_error;
  std::optional<double> rankin_alpha;
  bool main_terms_truncated = false;
  std::optional<double> lemma45_z;
  std::optional<double> lemma45_lhs;
  std::optional<double> lemma45_rhs;
  std::optional<double> lemma45_diagnostic;

  std::optional<double> theorem_bound;
  std::optional<double> corollary_bound;
  std::optional<double> theorem_diagnostic;
  Feasibility feasibility;
};

namespace detail {

inline std::optional<double> finite_or_none(double v) {
  if (std::isfinite(v)) return v;
  return std::nullopt;
}

/// (1 - delta) log T / log log T, or nothing when log log T <= 0.
inline std::optional<double> theorem_exponent_squared(double log_T, double delta) {
  if (!(log_T > 1.0)) return std::nullopt;
  return (1.0 - delta) * log_T / std::log(log_T);
}

}  // namespace detail

/// Fills the derived fields of a report whose components are computed:
/// ratio = diag_sum / (N sum r^2) (no f anywhere), lower_bound = sqrt(ratio),
/// the rigorous bracket from the off-diagonal bounds, the theorem-shaped
/// bounds and the feasibility flags.
inline MomentReport ratio_and_bounds(MomentReport report) {
  const double Nd = static_cast<double>(report.N);
  report.m2_diag_main = (report.T / Nd) * report.phi_hat0 * report.diag_sum;
  report.ratio = report.diag_sum / (Nd * report.sum_r_squared);
  report.lower_bound = std::sqrt(report.ratio);

  const double m1_hi = report.m1_main + report.m1_offdiag_bound;
  const double m1_lo = report.m1_main - report.m1_offdiag_bound;
  report.ratio_lower = (report.m2_diag_main - report.offdiag_bound) / m1_hi;
  report.ratio_upper = m1_lo > 0.0 ? (report.m2_diag_main + report.offdiag_bound) / m1_lo
                                   : std::numeric_limits<double>::infinity();
  report.bracket_lower_bound = std::sqrt(std::max(0.0, report.ratio_lower));

  const double delta = report.delta;
  if (const auto e2 = detail::theorem_exponent_squared(report.log_T, delta)) {
    report.theorem_bound = std::exp(std::sqrt(*e2));
    report.theorem_diagnostic = std::log(report.lower_bound) / std::sqrt(*e2);
  }
  const double log_n = std::log(Nd);
  if (report.C && log_n > 1.0) {
    const double e2 = ((1.0 - delta) / (1.0 + report.gamma)) * (*report.C) * log_n / std::log(log_n);
    report.corollary_bound = std::exp(std::sqrt(e2));
  }
  if (report.lemma45_lhs && std::isfinite(report.lambda) && report.lambda > 1.0) {
    report.lemma45_diagnostic = std::log(*report.lemma45_lhs) * std::log(report.lambda) / report.lambda;
  }

  auto& flags = report.feasibility;
  flags.t_ge_n_pow_2_over_delta = report.log_T >= (2.0 / delta) * log_n;
  flags.c_le_log_n_pow_gamma = report.C.has_value() && log_n > 0.0 && *report.C <= std::pow(log_n, report.gamma);
  const double lam = report.lambda;
  const double threshold =
      (std::isfinite(lam) && lam > 1.0) ? 3.0 * lam * std::log(std::log(lam)) : std::numeric_limits<double>::quiet_NaN();
  flags.log_n_gt_3_lambda_loglog_lambda = log_n > threshold;
  flags.log_x_gt_3_lambda_loglog_lambda = report.log_X > threshold;
  flags.window_nonempty = report.prime_count > 0;
  return report;
}

inline nlohmann::ordered_json to_json(const Feasibility& f) {
  nlohmann::ordered_json j;
  j["t_ge_n_pow_2_over_delta"] = f.t_ge_n_pow_2_over_delta;
  j["c_le_log_n_pow_gamma"] = f.c_le_log_n_pow_gamma;
  j["log_n_gt_3_lambda_loglog_lambda"] = f.log_n_gt_3_lambda_loglog_lambda;
  j["log_x_gt_3_lambda_loglog_lambda"] = f.log_x_gt_3_lambda_loglog_lambda;
  j["window_nonempty"] = f.window_nonempty;
  return j;
}

namespace detail {

inline nlohmann::ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

inline nlohmann::ordered_json number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return number(*v);
}

}  // namespace detail

/// Stable JSON schema: keys appear in this order in every report.
inline nlohmann::ordered_json to_json(const MomentReport& r) {
  using detail::number;
  nlohmann::ordered_json j;
  j["N"] = r.N;
  j["T"] = number(r.T);
  j["log_T"] = number(r.log_T);
  j["X"] = number(r.X);
  j["log_X"] = number(r.log_X);
  j["C"] = number(r.C);
  j["delta"] = r.delta;
  j["gamma"] = r.gamma;
  j["lambda"] = number(r.lambda);
  j["support_lo"] = number(r.support_lo);
  j["support_hi"] = number(r.support_hi);
  j["prime_count"] = r.prime_count;
  j["support_size"] = r.support_size;
  j["support_cap"] = number(r.support_cap);
  j["support_truncated"] = r.support_truncated;
  j["resonator_degenerate"] = r.resonator_degenerate;
  j["sum_r"] = number(r.sum_r);
  j["sum_r_squared"] = number(r.sum_r_squared);
  j["log_euler_product"] = number(r.log_euler_product);
  j["phi_hat0"] = number(r.phi_hat0);
  j["m1_quad"] = number(r.m1_quad);
  j["m1_exact"] = number(r.m1_exact);
  j["m1_main"] = number(r.m1_main);
  j["m1_offdiag_bound"] = number(r.m1_offdiag_bound);
  j["m2_quad"] = number(r.m2_quad);
  j["m2_exact"] = number(r.m2_exact);
  j["diag_sum"] = number(r.diag_sum);
  j["m2_diag_main"] = number(r.m2_diag_main);
  j["offdiag_bound"] = number(r.offdiag_bound);
  j["coarse_diag_lower_bound"] = number(r.coarse_diag_lower_bound);
  j["min_offdiag_gap"] = number(r.min_offdiag_gap);
  j["nu"] = r.nu;
  j["c_nu"] = number(r.c_nu);
  j["xi_min"] = number(r.xi_min);
  j["xi_floor"] = number(r.xi_floor);
  j["offdiag_constant"] = "empirical";
  j["ratio"] = number(r.ratio);
  j["ratio_lower"] = number(r.ratio_lower);
  j["ratio_upper"] = number(r.ratio_upper);
  j["lower_bound"] = number(r.lower_bound);
  j["bracket_lower_bound"] = number(r.bracket_lower_bound);
  j["hough_main"] = number(r.hough_main);
  j["rankin_error"] = number(r.rankin_error);
  j["rankin_alpha"] = number(r.rankin_alpha);
  j["main_terms_truncated"] = r.main_terms_truncated;
  j["lemma45_z"] = number(r.lemma45_z);
  j["lemma45_lhs"] = number(r.lemma45_lhs);
  j["lemma45_rhs"] = number(r.lemma45_rhs);
  j["lemma45_diagnostic"] = number(r.lemma45_diagnostic);
  j["theorem_bound"] = number(r.theorem_bound);
  j["corollary_bound"] = number(r.corollary_bound);
  j["theorem_diagnostic"] = number(r.theorem_diagnostic);
  j["feasibility"] = to_json(r.feasibility);
  return j;
}

/// CSV columns, in order. Flags are written as 0/1, missing values as empty cells.
inline const std::vector<std::string>& report_csv_columns() {
  static const std::vector<std::string> columns = {
      "N", "T", "log_T", "X", "log_X", "C", "delta", "gamma", "lambda", "prime_count", "support_size",
      "support_cap", "support_truncated", "sum_r_squared", "log_euler_product", "m1_quad", "m1_exact", "m1_main",
      "m2_quad", "m2_exact", "diag_sum", "m2_diag_main", "offdiag_bound", "ratio", "ratio_lower", "ratio_upper",
      "lower_bound", "bracket_lower_bound", "hough_main", "rankin_error", "lemma45_lhs", "lemma45_rhs",
      "theorem_bound", "corollary_bound", "theorem_diagnostic", "t_ge_n_pow_2_over_delta", "c_le_log_n_pow_gamma",
      "log_n_gt_3_lambda_loglog_lambda", "log_x_gt_3_lambda_loglog_lambda", "window_nonempty"};
  return columns;
}

inline std::string csv_header() {
  std::string out;
  for (const auto& c : report_csv_columns()) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out;
}

inline std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

inline std::string csv_row(const MomentReport& r) {
  const auto& f = r.feasibility;
  const std::vector<std::string> cells = {
      std::to_string(r.N), csv_number(r.T), csv_number(r.log_T), csv_number(r.X), csv_number(r.log_X),
      csv_number(r.C), csv_number(r.delta), csv_number(r.gamma), csv_number(r.lambda),
      std::to_string(r.prime_count), std::to_string(r.support_size), csv_number(r.support_cap),
      r.support_truncated ? "1" : "0", csv_number(r.sum_r_squared), csv_number(r.log_euler_product),
      csv_number(r.m1_quad), csv_number(r.m1_exact), csv_number(r.m1_main), csv_number(r.m2_quad),
      csv_number(r.m2_exact), csv_number(r.diag_sum), csv_number(r.m2_diag_main), csv_number(r.offdiag_bound),
      csv_number(r.ratio), csv_number(r.ratio_lower), csv_number(r.ratio_upper), csv_number(r.lower_bound),
      csv_number(r.bracket_lower_bound), csv_number(r.hough_main), csv_number(r.rankin_error),
      csv_number(r.lemma45_lhs), csv_number(r.lemma45_rhs), csv_number(r.theorem_bound),
      csv_number(r.corollary_bound), csv_number(r.theorem_diagnostic), f.t_ge_n_pow_2_over_delta ? "1" : "0",
      f.c_le_log_n_pow_gamma ? "1" : "0", f.log_n_gt_3_lambda_loglog_lambda ? "1" : "0",
      f.log_x_gt_3_lambda_loglog_lambda ? "1" : "0", f.window_nonempty ? "1" : "0"};
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace resonance
