// Command-line front end: certify, search, oracle, resonator, sweep.
//
// Exit codes: 0 success, 2 usage or invalid config, 3 budget or resource
// limit, 4 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resonance/pipeline.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> n;
  std::optional<double> c, t, log_x, delta, gamma, eps, alpha, scan_lo, scan_hi;
  std::optional<std::string> f, format, out, trace_out, check, toy;
  std::optional<std::uint64_t> seed, budget_terms, exact_budget, support_budget, sieve_limit, trace_stride, x;
  std::optional<int> nu;
  bool guided = false;
  std::vector<std::uint64_t> sweep_n, sweep_seed;
  std::vector<double> sweep_c, sweep_delta;
};

void add_common(CLI::App* app, Flags& fl) {
  app->add_option("--config", fl.config_path, "JSON config file (a previous report also works)");
  app->add_option("--n", fl.n, "Dirichlet polynomial length N");
  app->add_option("--c", fl.c, "exponent C with T = N^C");
  app->add_option("--t", fl.t, "height T (instead of --c)");
  app->add_option("--log-x", fl.log_x, "override the resonator length log X");
  app->add_option("--delta", fl.delta, "delta in (0,1)");
  app->add_option("--gamma", fl.gamma, "gamma in (0,1)");
  app->add_option("--f", fl.f, "one | arch:ALPHA | steinhaus");
  app->add_option("--seed", fl.seed, "Steinhaus seed");
  app->add_option("--eps", fl.eps, "search slack (default 1e-3 sqrt(N))");
  app->add_option("--nu", fl.nu, "decay order for the off-diagonal bound");
  app->add_option("--alpha", fl.alpha, "Rankin exponent override");
  app->add_option("--budget-terms", fl.budget_terms, "evaluation budget");
  app->add_option("--exact-budget", fl.exact_budget, "pair budget for the direct moment sums");
  app->add_option("--support-budget", fl.support_budget, "resonator support enumeration budget");
  app->add_option("--sieve-limit", fl.sieve_limit, "largest integer the factor table covers");
  app->add_option("--format", fl.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--out", fl.out, "output path (default stdout)");
  app->add_option("--trace-stride", fl.trace_stride, "write every K-th search grid point");
  app->add_option("--trace-out", fl.trace_out, "trace CSV path (default stderr)");
}

resonance::RunConfig merge(const Flags& fl) {
  resonance::RunConfig c = fl.config_path.empty() ? resonance::RunConfig{} : resonance::load_config(fl.config_path);
  if (fl.n) c.n = *fl.n;
  if (fl.c) {
    c.c = fl.c;
    c.t.reset();
  }
  if (fl.t) {
    c.t = fl.t;
    if (!fl.c) c.c.reset();
  }
  if (fl.log_x) c.log_x = fl.log_x;
  if (fl.delta) c.delta = *fl.delta;
  if (fl.gamma) c.gamma = *fl.gamma;
  if (fl.f) c.f = *fl.f;
  if (fl.seed) c.seed = *fl.seed;
  if (fl.eps) c.eps = fl.eps;
  if (fl.nu) c.nu = *fl.nu;
  if (fl.alpha) c.alpha = fl.alpha;
  if (fl.budget_terms) c.budget_terms = *fl.budget_terms;
  if (fl.exact_budget) c.exact_budget = *fl.exact_budget;
  if (fl.support_budget) c.support_budget = *fl.support_budget;
  if (fl.sieve_limit) c.sieve_limit = *fl.sieve_limit;
  if (fl.format) c.format = *fl.format;
  if (fl.out) c.out = *fl.out;
  if (fl.trace_stride) c.trace_stride = *fl.trace_stride;
  if (fl.trace_out) c.trace_out = *fl.trace_out;
  if (fl.scan_lo) c.scan_lo = fl.scan_lo;
  if (fl.scan_hi) c.scan_hi = fl.scan_hi;
  if (fl.guided) c.guided = true;
  if (fl.check) c.check = *fl.check;
  if (fl.x) c.x = fl.x;
  if (fl.toy) {
    // "n:r,n:r,..."
    c.toy.clear();
    std::stringstream ss(*fl.toy);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw resonance::usage_error("--toy entries look like n:r");
      try {
        c.toy[std::stoull(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw resonance::usage_error("bad --toy entry '" + item + "'");
      }
    }
  }
  if (!fl.sweep_n.empty()) c.sweep_n = fl.sweep_n;
  if (!fl.sweep_c.empty()) c.sweep_c = fl.sweep_c;
  if (!fl.sweep_delta.empty()) c.sweep_delta = fl.sweep_delta;
  if (!fl.sweep_seed.empty()) c.sweep_seed = fl.sweep_seed;
  return c;
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw resonance::usage_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance-method certificates for large values of Dirichlet polynomials"};
  app.require_subcommand(1);
  Flags fl;

  auto* certify = app.add_subcommand("certify", "compute a moment report");
  add_common(certify, fl);
  auto* search = app.add_subcommand("search", "certified grid search for sup |D_N(t)|");
  add_common(search, fl);
  search->add_option("--scan-lo", fl.scan_lo, "scan window start (default -T)");
  search->add_option("--scan-hi", fl.scan_hi, "scan window end (default T)");
  search->add_flag("--guided", fl.guided, "resonance-guided search (no slack certificate)");
  auto* oracle = app.add_subcommand("oracle", "brute-force cross-checks");
  add_common(oracle, fl);
  oracle->add_option("--check", fl.check, "diagonal | bijection | gap | m2quad");
  oracle->add_option("--x", fl.x, "integer X for the diagonal, bijection and gap checks");
  oracle->add_option("--toy", fl.toy, "toy resonator as n:r,n:r,... (default r = 1 on 1..X)");
  auto* resonator = app.add_subcommand("resonator", "resonator summary");
  add_common(resonator, fl);
  auto* sweep = app.add_subcommand("sweep", "CSV of reports over a grid of (N, C, delta, seed)");
  add_common(sweep, fl);
  sweep->add_option("--ns", fl.sweep_n, "values of N")->delimiter(',');
  sweep->add_option("--cs", fl.sweep_c, "values of C")->delimiter(',');
  sweep->add_option("--deltas", fl.sweep_delta, "values of delta")->delimiter(',');
  sweep->add_option("--seeds", fl.sweep_seed, "Steinhaus seeds")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const auto config = merge(fl);
    if (certify->parsed()) {
      emit(resonance::cmd_certify(config), config.out);
    } else if (search->parsed()) {
      std::ofstream trace_file;
      std::ostream* trace = nullptr;
      if (config.trace_stride > 0) {
        if (config.trace_out.empty()) {
          trace = &std::cerr;
        } else {
          trace_file.open(config.trace_out);
          if (!trace_file) throw resonance::usage_error("cannot write " + config.trace_out);
          trace = &trace_file;
        }
      }
      emit(resonance::cmd_search(config, trace), config.out);
    } else if (oracle->parsed()) {
      emit(resonance::cmd_oracle(config), config.out);
    } else if (resonator->parsed()) {
      emit(resonance::cmd_resonator(config), config.out);
    } else if (sweep->parsed()) {
      emit(resonance::cmd_sweep(config), config.out);
    }
  } catch (const resonance::resource_limit_error& e) {
    std::cerr << "resource limit: " << e.what() << " (required " << e.required() << ")\n";
    return 3;
  } catch (const resonance::numerical_failure& e) {
    std::cerr << "numerical failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
