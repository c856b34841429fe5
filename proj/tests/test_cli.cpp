#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "levy_escape/cli.hpp"

using namespace levy_escape::cli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string temp_path(const char* name) {
  return std::string("/tmp/levy_escape_test_") + name;
}

}  // namespace

TEST_CASE("config_parse fills documented defaults") {
  const RunConfig cfg = config_parse("problem = bm_interval\n");
  CHECK(cfg.problem == Problem::BmInterval);
  CHECK(cfg.n_paths == 100000);
  CHECK(cfg.dt == 1e-4);
  CHECK(cfg.grid_n == 1000);
  CHECK(cfg.seed == 1);
  CHECK(cfg.max_time == 1e4);
  CHECK(cfg.format == Format::Csv);
  CHECK(cfg.out == "-");
}

TEST_CASE("config round-trips through its serialization") {
  RunConfig cfg;
  cfg.problem = Problem::StableInterval;
  cfg.route = Route::Compare;
  cfg.r = 2.0;
  cfg.alpha = 1.5;
  cfg.target_u = "right";
  cfg.n_paths = 12345;
  cfg.dt = 2.5e-4;
  cfg.seed = 77;
  cfg.sweep = {-1.5, 0.0, 0.25, 1.5};
  cfg.out = "result.csv";
  cfg.format = Format::Json;
  const RunConfig back = config_parse(config_serialize(cfg));
  CHECK(back == cfg);

  RunConfig with_table;
  with_table.problem = Problem::DriftInterval;
  with_table.drift = "table";
  with_table.drift_table_x = {-2.0, 0.0, 2.0};
  with_table.drift_table_y = {1.0, 0.0, -1.0};
  CHECK(config_parse(config_serialize(with_table)) == with_table);
}

TEST_CASE("config_parse rejects unknown and duplicate keys with line info") {
  try {
    config_parse("problem = bm_interval\nfoo = 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "foo");
    CHECK(e.line == 2);
  }
  try {
    config_parse("r = 1\nr = 2\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "r");
    CHECK(e.line == 2);
    CHECK(e.message.find("duplicate") != std::string::npos);
  }
  CHECK_THROWS_AS(config_parse("dt = fast\n"), ConfigError);
  CHECK_THROWS_AS(config_parse("just a line\n"), ConfigError);
}

TEST_CASE("config_validate: mutually exclusive targets, field-named errors") {
  RunConfig both = config_parse("problem = bm_interval\ngamma = right\ntarget_u = right\n");
  try {
    config_validate(both);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "target_u");
  }

  // alpha = 2.5 is outside (0, 2); the error names the offending field.
  RunConfig bad_alpha = config_parse("problem = stable_interval\nalpha = 2.5\n");
  try {
    config_validate(bad_alpha);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field == "alpha");
  }
  CHECK(run(bad_alpha) != 0);

  RunConfig no_alpha = config_parse("problem = stable_interval\n");
  CHECK_THROWS_AS(config_validate(no_alpha), ConfigError);
}

TEST_CASE("run: identical configs produce byte-identical outputs") {
  RunConfig cfg = config_parse(
      "problem = bm_interval\n"
      "route = mc\n"
      "n_paths = 300\n"
      "dt = 1e-3\n"
      "seed = 5\n"
      "sweep = -1:1:3\n");
  cfg.out = temp_path("bytes_a.csv");
  REQUIRE(run(cfg) == 0);
  cfg.out = temp_path("bytes_b.csv");
  REQUIRE(run(cfg) == 0);
  const std::string a = read_file(temp_path("bytes_a.csv"));
  const std::string b = read_file(temp_path("bytes_b.csv"));
  CHECK(a == b);
  CHECK(!a.empty());
  CHECK(a.find('\r') == std::string::npos);

  // Worker count must not change a byte either.
  setenv("LEVY_ESCAPE_THREADS", "3", 1);
  cfg.out = temp_path("bytes_c.csv");
  REQUIRE(run(cfg) == 0);
  unsetenv("LEVY_ESCAPE_THREADS");
  CHECK(read_file(temp_path("bytes_c.csv")) == a);
}

TEST_CASE("run: compare output is sorted, complete, and reports a summary") {
  RunConfig cfg = config_parse(
      "problem = bm_interval\n"
      "route = compare\n"
      "n_paths = 200\n"
      "dt = 1e-3\n"
      "grid_n = 59\n"
      "seed = 2\n"
      "sweep = 1.0,-1.0,0.0,1.0\n");  // unsorted, one duplicate
  cfg.out = temp_path("compare.csv");
  REQUIRE(run(cfg) == 0);
  const std::string text = read_file(cfg.out);
  std::istringstream lines(text);
  std::string header;
  std::getline(lines, header);
  CHECK(header ==
        "x,mc_p,mc_stderr,solver_p,oracle_p,abs_mc_minus_oracle,abs_solver_minus_oracle");
  std::vector<double> xs;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("# summary:", 0) == 0) break;
    xs.push_back(std::strtod(line.c_str(), nullptr));
  }
  REQUIRE(xs.size() == 3);
  CHECK(xs[0] == -1.0);
  CHECK(xs[1] == 0.0);
  CHECK(xs[2] == 1.0);
  CHECK(text.find("# summary: max_mc_vs_oracle=") != std::string::npos);
}

TEST_CASE("run: json output carries rows and summary") {
  RunConfig cfg = config_parse(
      "problem = bm_interval\n"
      "route = oracle\n"
      "sweep = -1:1:5\n"
      "format = json\n");
  cfg.out = temp_path("oracle.json");
  REQUIRE(run(cfg) == 0);
  const std::string text = read_file(cfg.out);
  CHECK(text.find("\"rows\"") != std::string::npos);
  CHECK(text.find("\"summary\"") != std::string::npos);
  CHECK(text.find("\"oracle_p\"") != std::string::npos);
}

TEST_CASE("run: compare on the Brownian interval reports solver-oracle agreement") {
  // The elliptic solve is exact on the affine solution, so the reported
  // max |solver - oracle| must sit at rounding level.
  RunConfig cfg = config_parse(
      "problem = bm_interval\n"
      "route = compare\n"
      "n_paths = 50\n"
      "dt = 1e-2\n"
      "seed = 9\n"
      "sweep = -1.9:1.9:33\n");
  cfg.out = temp_path("bm_compare.csv");
  REQUIRE(run(cfg) == 0);
  const std::string text = read_file(cfg.out);
  const auto pos = text.find("max_solver_vs_oracle=");
  REQUIRE(pos != std::string::npos);
  const double reported = std::strtod(text.c_str() + pos + 21, nullptr);
  CHECK(reported < 1e-9);
}

TEST_CASE("run: stable oracle sweep is monotone increasing") {
  RunConfig cfg = config_parse(
      "problem = stable_interval\n"
      "alpha = 1.5\n"
      "route = oracle\n"
      "sweep = -1.9:1.9:9\n");
  cfg.out = temp_path("stable_oracle.csv");
  REQUIRE(run(cfg) == 0);
  std::istringstream lines(read_file(cfg.out));
  std::string line;
  std::getline(lines, line);  // header
  double prev = -1.0;
  int rows = 0;
  while (std::getline(lines, line) && line.rfind("#", 0) != 0) {
    const auto comma = line.find(',');
    const double p = std::strtod(line.c_str() + comma + 1, nullptr);
    CHECK(p > prev);
    prev = p;
    ++rows;
  }
  CHECK(rows == 9);
}

TEST_CASE("run: sample-check passes for a healthy sampler") {
  RunConfig cfg = config_parse(
      "route = sample-check\n"
      "alpha = 1.0\n"
      "n_paths = 60000\n"
      "seed = 4\n");
  cfg.out = temp_path("sample_check.csv");
  CHECK(run(cfg) == 0);
  const std::string text = read_file(cfg.out);
  CHECK(text.find("ks_density") != std::string::npos);
  CHECK(text.find("all_pass=true") != std::string::npos);
}

TEST_CASE("run: sweep points outside the domain are rejected") {
  RunConfig cfg = config_parse(
      "problem = bm_interval\n"
      "route = oracle\n"
      "sweep = -3:3:5\n");
  CHECK(run(cfg) != 0);
}
