#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(RESONANCE_CLI) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string without_timestamp(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::string out;
  while (std::getline(in, line)) {
    if (line.find("\"generated_at\"") != std::string::npos) continue;
    out += line + "\n";
  }
  return out;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) cells.push_back(cell);
  if (!line.empty() && line.back() == sep) cells.emplace_back();
  return cells;
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("resonance_cli_test_" + name);
}

}  // namespace

TEST(Cli, CertifyLengthOne) {
  const auto r = run("certify --n 1 --c 2");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["report"]["ratio"].get<double>(), 1.0);
  EXPECT_EQ(j["report"]["lower_bound"].get<double>(), 1.0);
  EXPECT_EQ(j["artifact_version"], "0.1.0");
  EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
}

TEST(Cli, CertifyIsDeterministic) {
  const std::string args = "certify --n 300 --c 3 --f steinhaus --seed 11";
  const auto a = run(args);
  const auto b = run(args);
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(without_timestamp(a.out), without_timestamp(b.out));
}

TEST(Cli, ReportReplaysFromEmbeddedConfig) {
  const auto path = temp_file("replay.json");
  const auto first = run("certify --n 30 --c 2 --seed 4 --out " + path.string());
  ASSERT_EQ(first.code, 0);
  std::ifstream in(path);
  std::stringstream saved;
  saved << in.rdbuf();
  const auto replay = run("certify --config " + path.string());
  ASSERT_EQ(replay.code, 0);
  EXPECT_EQ(without_timestamp(saved.str()), without_timestamp(replay.out));
  std::filesystem::remove(path);
}

TEST(Cli, FlatConfigFileWithFlagOverride) {
  const auto path = temp_file("flat.json");
  {
    std::ofstream out(path);
    out << R"({"n": 50, "c": 2.0, "delta": 0.4, "f": "one"})";
  }
  const auto r = run("certify --config " + path.string() + " --n 60");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["report"]["N"].get<int>(), 60);
  EXPECT_EQ(j["report"]["delta"].get<double>(), 0.4);
  EXPECT_EQ(j["config"]["f"], "one");
  {
    std::ofstream out(path);
    out << R"({"n": 50, "c": 2.0, "unknown_field": 1})";
  }
  EXPECT_EQ(run("certify --config " + path.string()).code, 2);
  std::filesystem::remove(path);
}

TEST(Cli, DeskScaleTheoremBound) {
  // log T = 100 with N = 1000 means C = 100 / log(1000).
  const double c = 100.0 / std::log(1000.0);
  char args[256];
  std::snprintf(args, sizeof args, "certify --n 1000 --c %.17g --delta 0.5 --budget-terms 1000000", c);
  const auto r = run(args);
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["report"]["log_T"].get<double>(), 100.0, 1e-12);
  EXPECT_NEAR(j["report"]["theorem_bound"].get<double>(), 26.98, 0.005);
  EXPECT_TRUE(j["report"]["support_truncated"].get<bool>());
  EXPECT_GE(j["report"]["ratio"].get<double>(), 1.0);
}

TEST(Cli, SearchConstantOne) {
  const auto r = run("search --n 40 --t 50 --f one");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["search"]["t_star"].get<double>(), 0.0);
  EXPECT_NEAR(j["search"]["value"].get<double>(), std::sqrt(40.0), 1e-12);
  EXPECT_TRUE(j["search"]["certified"].get<bool>());
}

TEST(Cli, SweepRowsShareRatio) {
  const auto r = run("sweep --n 200 --c 3 --seeds 1,2,3");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  const auto columns = split(header, ',');
  const auto ratio_col = std::find(columns.begin(), columns.end(), "ratio") - columns.begin();
  ASSERT_LT(static_cast<std::size_t>(ratio_col), columns.size());
  std::vector<std::string> ratios;
  std::string line;
  while (std::getline(in, line)) {
    const auto cells = split(line, ',');
    ASSERT_EQ(cells.size(), columns.size());
    ratios.push_back(cells[ratio_col]);
  }
  ASSERT_EQ(ratios.size(), 3u);
  EXPECT_EQ(ratios[0], ratios[1]);
  EXPECT_EQ(ratios[1], ratios[2]);
}

TEST(Cli, CsvCertify) {
  const auto r = run("certify --n 100 --c 3 --format csv");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string header;
  std::string row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header.rfind("N,T,log_T,X,log_X,C,", 0), 0u);
  EXPECT_EQ(split(header, ',').size(), split(row, ',').size());
}

TEST(Cli, OracleChecks) {
  auto r = run("oracle --check diagonal --n 2 --x 2 --c 1");
  ASSERT_EQ(r.code, 0);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["oracle"]["bruteforce"].get<double>(), 6.0);
  EXPECT_EQ(j["oracle"]["parametrized"].get<double>(), 6.0);
  r = run("oracle --check diagonal --n 5 --x 12 --c 1 --toy 1:1,2:0.5,3:0.25,6:0.125");
  ASSERT_EQ(r.code, 0);
  j = nlohmann::json::parse(r.out);
  EXPECT_LE(j["oracle"]["relative_difference"].get<double>(), 1e-12);
  r = run("oracle --check bijection --n 9 --x 14 --c 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(nlohmann::json::parse(r.out)["oracle"]["bijection"].get<bool>());
  r = run("oracle --check gap --n 3 --x 2 --c 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(nlohmann::json::parse(r.out)["oracle"]["min_offdiag_gap"].get<double>(), std::log(4.0 / 3.0), 1e-15);
}

TEST(Cli, ResonatorSummary) {
  const auto r = run("resonator --n 10 --t 1 --log-x 20.25");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["resonator"]["support"], nlohmann::json::parse("[1, 61, 67, 4087]"));
  EXPECT_EQ(j["resonator"]["prime_count"].get<int>(), 2);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("certify --n 10 --c 2 --delta 2").code, 2);
  EXPECT_EQ(run("certify --n 10").code, 2);
  EXPECT_EQ(run("certify --n 10 --c 2 --t 5").code, 2);
  EXPECT_EQ(run("certify --n 10 --c 2 --f bogus").code, 2);
  EXPECT_EQ(run("certify --n 10 --c 2 --no-such-flag").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("certify --n 1000 --c 20 --sieve-limit 5000").code, 3);
  EXPECT_EQ(run("search --n 1000 --c 3 --budget-terms 1000").code, 3);
}
