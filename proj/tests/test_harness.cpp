#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isingtorus/harness.hpp"

using namespace isingtorus;

TEST_CASE("config parsing") {
  SUBCASE("valid config") {
    std::istringstream in(
        "# a comment\n"
        "lattice = square\n"
        "torus = 3 0 0 3\n"
        "torus = 4 0 1 3   # inline comment\n"
        "tau = 0 2\n"
        "sizes = 64 128 256\n"
        "alpha = 0.3\n"
        "suite = theorem1\n"
        "jobs = 2\n");
    Config cfg = parse_config(in);
    CHECK(cfg.tori.size() == 2);
    CHECK(cfg.tau == complexd(0, 2));
    CHECK(cfg.sizes.size() == 3);
    CHECK(cfg.alpha == 0.3);
    CHECK(cfg.suites == std::vector<std::string>{"theorem1"});
    CHECK(cfg.jobs == 2);
  }
  SUBCASE("unknown keys are errors with a line number") {
    std::istringstream in("lattice = square\nfrobnicate = 7\n");
    try {
      parse_config(in);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(std::string(e.what()).find("frobnicate") != std::string::npos);
    }
  }
  SUBCASE("alpha domain is enforced at parse time") {
    std::istringstream in("alpha = 1.7\n");
    CHECK_THROWS_AS(parse_config(in), ConfigError);
  }
  SUBCASE("malformed lines rejected") {
    std::istringstream in("torus 3 0 0 3\n");
    CHECK_THROWS_AS(parse_config(in), ConfigError);
  }
}

TEST_CASE("suite filtering") {
  Config cfg;
  cfg.suites = {"theorem1"};
  cfg.tori = {{3, 0, 0, 3}};
  Report rep = run_verify(cfg);
  CHECK(rep.all_passed());
  for (const CheckResult& c : rep.checks) CHECK(c.name.find("theorem1") == 0);
}

TEST_CASE("report serialization round trip") {
  Report rep;
  ReportRow row;
  row.quantity = "energy_sum";
  row.n = 9;
  row.omega1 = {3, 0};
  row.omega2 = {0, 3};
  row.alpha = std::sqrt(2.0) - 1.0;
  row.value = 0.19703281915806355;
  row.limit = 0.19703281915806363;
  row.abs_err = std::abs(row.value - row.limit);
  row.rel_err = row.abs_err / row.limit;
  rep.rows.push_back(row);
  rep.add_check("demo", 0.0, 1.0);

  std::string csv = "/tmp/isingtorus_test_report.csv";
  std::string json = "/tmp/isingtorus_test_report.json";
  rep.write_csv(csv);
  rep.write_json(json);

  // CSV round trip: 17 significant digits reproduce the doubles bit-exactly
  std::ifstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "quantity,N,omega1x,omega1y,omega2x,omega2y,alpha,value,limit,abs_err,rel_err");
  std::getline(in, line);
  std::vector<std::string> fields;
  std::stringstream ls(line);
  std::string f;
  while (std::getline(ls, f, ',')) fields.push_back(f);
  REQUIRE(fields.size() == 11);
  CHECK(fields[0] == "energy_sum");
  CHECK(std::stod(fields[7]) == row.value);
  CHECK(std::stod(fields[8]) == row.limit);

  nlohmann::json j;
  std::ifstream jin(json);
  jin >> j;
  CHECK(j["all_passed"] == true);
  CHECK(j["rows"][0]["value"] == row.value);
  std::remove(csv.c_str());
  std::remove(json.c_str());
}

TEST_CASE("periods for tau") {
  TorusPeriods p = periods_for_tau({0, 1}, 8);
  CHECK(p.omega1 == Vec2i{8, 0});
  CHECK(p.omega2 == Vec2i{0, 8});
  TorusPeriods q = periods_for_tau({0, 2}, 8);
  CHECK(q.omega2 == Vec2i{0, 16});
}

TEST_CASE("sweep report determinism") {
  Config cfg;
  cfg.tau = {0, 1};
  cfg.sizes = {16, 32};
  Report a = run_sweep(cfg);
  Report b = run_sweep(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].value == b.rows[i].value);  // bitwise
  }
}

TEST_CASE("diff study rejects oversized tori") {
  Config cfg;
  cfg.tori = {{6, 0, 0, 6}};
  CHECK_THROWS_AS(run_diff_study(cfg), std::invalid_argument);
}
