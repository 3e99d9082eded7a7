#include <catch2/catch.hpp>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

#include "gwsql/report.hpp"

using namespace gwsql;
namespace rep = gwsql::report;

namespace {
bool same_bits(double a, double b) {
  std::uint64_t ua, ub;
  std::memcpy(&ua, &a, 8);
  std::memcpy(&ub, &b, 8);
  return ua == ub;
}
}  // namespace

TEST_CASE("format_double emits shortest round-trip decimals") {
  for (double v : {0.1, 1.0 / 3.0, 4.9407922e-24, -2.5e300, 1e-300, 0.0, -0.0,
                   123456789.123456789}) {
    const std::string s = rep::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(same_bits(back, v));
  }
  CHECK(rep::format_double(1.0) == "1");
  CHECK(rep::format_double(0.5) == "0.5");
}

TEST_CASE("csv escaping follows the quoting rules") {
  CHECK(rep::csv_escape("plain") == "plain");
  CHECK(rep::csv_escape("a,b") == "\"a,b\"");
  CHECK(rep::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
}

TEST_CASE("csv round trip recovers exact values") {
  std::mt19937_64 rng(424242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  rep::Table t;
  t.headers = {"a[-]", "b[1/s]", "c, with comma [m]"};
  for (int i = 0; i < 50; ++i) {
    const double scale = std::pow(10.0, -30 + (i % 61));
    t.rows.push_back({u(rng) * scale, u(rng), u(rng) / scale});
  }
  const auto parsed = rep::parse_csv(rep::to_csv(t));
  REQUIRE(parsed.headers == t.headers);
  REQUIRE(parsed.rows.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t j = 0; j < t.rows[i].size(); ++j)
      CHECK(same_bits(parsed.rows[i][j], t.rows[i][j]));
}

TEST_CASE("csv and json carry identical values field for field") {
  rep::Table t;
  t.headers = {"x[-]", "y[-]"};
  t.rows = {{0.1, 4.9407922e-24}, {-1.0 / 3.0, 2.5e17}};
  const auto parsed = rep::parse_csv(rep::to_csv(t));
  const auto j = nlohmann::json::parse(rep::to_json(t).dump());
  REQUIRE(j.size() == t.rows.size());
  for (size_t i = 0; i < t.rows.size(); ++i) {
    for (size_t k = 0; k < t.headers.size(); ++k) {
      const double jv = j[i][t.headers[k]].get<double>();
      CHECK(same_bits(jv, parsed.rows[i][k]));
      CHECK(same_bits(jv, t.rows[i][k]));
    }
  }
}

TEST_CASE("emission is deterministic") {
  rep::Table t;
  t.headers = {"v[-]"};
  t.rows = {{1.0 / 7.0}, {3.0e-9}};
  CHECK(rep::to_csv(t) == rep::to_csv(t));
  CHECK(rep::to_json(t).dump(2) == rep::to_json(t).dump(2));
}

TEST_CASE("parse_csv rejects non-numeric payloads") {
  CHECK_THROWS_AS(rep::parse_csv("h[-]\nnot_a_number\n"), std::invalid_argument);
}

TEST_CASE("verification checks serialize with the full field set") {
  std::vector<oracle::VerificationCheck> checks;
  checks.push_back(oracle::make_check("demo", 1.0, 1.0 + 1e-12, 1e-10));
  const auto j = rep::checks_to_json(checks);
  REQUIRE(j.size() == 1);
  for (const char* key : {"check", "expected", "actual", "abs_err", "rel_err", "tol", "pass"})
    CHECK(j[0].contains(key));
  CHECK(j[0]["pass"].get<bool>());
}
