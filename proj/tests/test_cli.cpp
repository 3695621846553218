#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <fstream>
#include <sstream>

#include "blochasym/decay_fit.hpp"
#include "blochasym/parallel.hpp"
#include "blochasym/runner.hpp"
#include "blochasym/table.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace blochasym;

namespace {

RunConfig sample_config() {
  RunConfig cfg;
  cfg.dim = 2;
  cfg.basis = {1.0, 0.25, -0.125, 0.9};
  cfg.entries = {{{1, 0}, 0.1, 0.0}, {{0, 1}, 0.05, 0.125}};
  cfg.s = 45.0;
  cfg.command = "solve";
  cfg.rho = {20.0, 40.0};
  cfg.points = {{0.37, 0.59}};
  cfg.order = 3;
  cfg.seed = 99;
  cfg.samples = 5000;
  cfg.format = "json";
  cfg.threads = 2;
  return cfg;
}

std::string temp_path(const std::string& name) {
  return "blochasym_test_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config round-trips through emit and parse") {
  const RunConfig cfg = sample_config();
  std::stringstream ss;
  write_config(ss, cfg);
  const RunConfig back = parse_config(ss);
  CHECK(back == cfg);
}

TEST_CASE("config parser reports the offending line") {
  std::stringstream ss("[lattice]\ndim = 2\nbogus_key = 1\n");
  try {
    parse_config(ss);
    FAIL("expected ConfigParse");
  } catch (const ConfigParse& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::stringstream bad_entry("[lattice]\ndim = 2\n[potential]\nentry = 1 0.5 1 0\n");
  CHECK_THROWS_AS(parse_config(bad_entry), ConfigParse);
  std::stringstream orphan("key = 1\n");
  CHECK_THROWS_AS(parse_config(orphan), ConfigParse);
}

TEST_CASE("decay fit: exact power law and failure modes") {
  const DecayFit exact = fit_decay(
      "synthetic", {{20.0, std::pow(20.0, -2)}, {40.0, std::pow(40.0, -2)},
                    {80.0, std::pow(80.0, -2)}},
      2.0);
  CHECK(exact.slope == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(exact.slope_stderr == doctest::Approx(0.0));
  CHECK(exact.pass);

  const DecayFit flat =
      fit_decay("flat", {{20.0, 1.0}, {40.0, 1.0}, {80.0, 1.0}}, 1.0);
  CHECK(flat.slope == doctest::Approx(0.0));
  CHECK_FALSE(flat.pass);

  CHECK_THROWS_AS(fit_decay("neg", {{20.0, 1.0}, {40.0, 0.0}, {80.0, 1.0}}, 1.0),
                  NonPositiveValue);
  CHECK_THROWS_AS(fit_decay("short", {{20.0, 1.0}, {40.0, 1.0}}, 1.0), Error);
  CHECK_THROWS_AS(
      fit_decay("order", {{40.0, 1.0}, {20.0, 1.0}, {80.0, 1.0}}, 1.0), Error);
}

TEST_CASE("csv writer escapes and json mirrors columns") {
  Table t;
  t.columns = {"name", "value"};
  t.add_row({"plain", format_g17(0.5)});
  t.add_row({"needs,quote", "a\"b"});
  std::stringstream csv;
  write_csv(csv, t);
  CHECK(csv.str() ==
        "name,value\nplain,0.5\n\"needs,quote\",\"a\"\"b\"\n");

  std::stringstream js;
  write_json(js, t, "demo");
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["command"] == "demo");
  CHECK(doc["rows"][0]["value"] == 0.5);
  CHECK(doc["rows"][1]["name"] == "needs,quote");
}

TEST_CASE("constants command emits the exponent table") {
  RunConfig cfg;
  cfg.command = "constants";
  cfg.output = temp_path("constants.csv");
  REQUIRE(run_command(cfg) == 0);
  const std::string content = slurp(cfg.output);
  CHECK(content.find("q,13") != std::string::npos);
  CHECK(content.find("k1,10") != std::string::npos);
  CHECK(content.find("p1,15") != std::string::npos);
  CHECK(content.find("margin") != std::string::npos);
  std::remove(cfg.output.c_str());
}

TEST_CASE("solve output is byte-identical across runs") {
  RunConfig cfg;
  cfg.command = "solve";
  cfg.rho = {10.0};
  cfg.points = {{0.37, 0.59}};
  cfg.output = temp_path("solve_a.csv");
  REQUIRE(run_command(cfg) == 0);
  const std::string first = slurp(cfg.output);
  cfg.output = temp_path("solve_b.csv");
  REQUIRE(run_command(cfg) == 0);
  const std::string second = slurp(cfg.output);
  CHECK(first == second);
  CHECK(first.find("N,lambda,b_abs") == 0);
  std::remove(temp_path("solve_a.csv").c_str());
  std::remove(temp_path("solve_b.csv").c_str());
}

TEST_CASE("classify and measure commands run end to end") {
  RunConfig cfg;
  cfg.command = "classify";
  cfg.points = {{-3.14159265358979, 29.8}, {10.0, 3.0}};
  cfg.rho = {30.0};
  cfg.output = temp_path("classify.csv");
  REQUIRE(run_command(cfg) == 0);
  const std::string content = slurp(cfg.output);
  CHECK(content.find("resonant") != std::string::npos);
  std::remove(cfg.output.c_str());

  RunConfig m;
  m.command = "measure";
  m.rho = {20.0};
  m.samples = 2000;
  m.seed = 3;
  m.format = "json";
  m.output = temp_path("measure.json");
  REQUIRE(run_command(m) == 0);
  const auto doc = nlohmann::json::parse(slurp(m.output));
  CHECK(doc["rows"].size() == 1);
  CHECK(doc["rows"][0]["fraction"].get<double>() <= 1.0);
  CHECK(doc["rows"][0]["fraction"].get<double>() >= 0.0);
  std::remove(m.output.c_str());
}

TEST_CASE("unknown command exits with status 1") {
  RunConfig cfg;
  cfg.command = "nope";
  CHECK(run_command(cfg) == 1);
}

TEST_CASE("worker count resolution") {
  CHECK(worker_count(3) == 3);
  CHECK(worker_count(0) >= 1);
  setenv("BLOCHASYM_THREADS", "5", 1);
  CHECK(worker_count(3) == 5);  // the environment wins
  unsetenv("BLOCHASYM_THREADS");
  CHECK(worker_count(3) == 3);
}
