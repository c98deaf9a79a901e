#include <set>
#include <string>

#include "doctest.h"
#include "softhard/cli/experiments.hpp"
#include "softhard/common/error.hpp"
#include "softhard/logic/parser.hpp"

using namespace softhard;
using namespace softhard::cli;

namespace {

const logic::PredicateRegistry& reg() {
  static const logic::PredicateRegistry r;
  return r;
}

logic::FormulaPtr P(const std::string& text) { return logic::parse_formula(text, "01", reg()); }

SweepConfig small() {
  SweepConfig c;
  c.exhaustive_max_len = 4;
  c.random_count = 20;
  c.random_max_len = 16;
  return c;
}

}  // namespace

TEST_CASE("modes round-trip through their names") {
  for (const char* name : {"temp/any", "temp/future", "pe/any", "pe/future"})
    CHECK(parse_mode(name).describe() == name);
  CHECK_THROWS_AS(parse_mode("soft/any"), PreconditionError);
}

TEST_CASE("sweep strings") {
  auto c = small();
  auto a = sweep_strings(c, 7);
  CHECK(a.size() == 30 + 20);
  CHECK(a.front() == "0");
  CHECK(a[29] == "1111");
  CHECK(sweep_strings(c, 7) == a);
  CHECK(sweep_strings(c, 8) != a);
  std::set<std::string> distinct(a.begin(), a.begin() + 30);
  CHECK(distinct.size() == 30);
  for (std::size_t k = 30; k < a.size(); ++k) {
    CHECK(a[k].size() >= 1);
    CHECK(a[k].size() <= 16);
  }
  CHECK(stream_of("Y Q1") != stream_of("Y Q0"));
}

TEST_CASE("standard suites cover fifteen suite/mode runs") {
  std::size_t runs = 0;
  for (const auto& s : standard_suites()) runs += s.modes.size();
  CHECK(runs == 15);
}

TEST_CASE("verify_formula reports exact agreement") {
  auto r = verify_formula(P("Q1 S Q0"), parse_mode("temp/any"), small(), reg());
  CHECK(r.ok());
  CHECK(r.mismatches == 0);
  CHECK(r.strings == 50);
  CHECK(r.error.empty());
}

TEST_CASE("verify_compiled detects a wrong readout") {
  auto cf = compiler::compile(P("Y Q1"), parse_mode("temp/any"), reg());
  cf.spec.readout = cf.coordinates.at("Q1");
  auto r = verify_compiled(cf, small(), reg());
  CHECK_FALSE(r.ok());
  CHECK(r.mismatches > 0);
  CHECK_FALSE(r.first_mismatch.empty());
}

TEST_CASE("verify_formula records mode errors") {
  auto r = verify_formula(P("X Q1"), parse_mode("temp/future"), small(), reg());
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.error.empty());
}

TEST_CASE("parity oracle flags a non-parity formula") {
  auto c = small();
  CHECK(verify_parity(P("ODD(#L[Q1])"), parse_mode("temp/any"), c, reg()).mismatches == 0);
  CHECK(verify_parity(P("Q1"), parse_mode("temp/any"), c, reg()).mismatches > 0);
}

TEST_CASE("dyck run") {
  DyckConfig c;
  c.k = 2;
  c.exhaustive_len = 4;
  c.random_count = 50;
  auto run = run_dyck(c);
  CHECK(run.mismatches == 0);
  CHECK(run.report["exhaustive_strings"] == 4 + 16 + 64 + 256);
  CHECK(run.report["random_strings"] == 50);
  CHECK(run_dyck(c).report == run.report);
}

TEST_CASE("ahat run on a small configuration") {
  AhatConfig c;
  c.exhaustive_max_len = 3;
  c.sampled_count = 20;
  c.sampled_max_len = 8;
  c.calibration_samples = 50;
  auto run = run_ahat(ahat::flip_flop_ahat(), c);
  CHECK(run.pass);
  CHECK(run.report["exhaustive"].size() == 3);
  auto growth = run_growth(ahat::flip_flop_ahat(), {4, 8, 16}, c);
  CHECK(growth.pass);
  CHECK(growth.spread >= 1.0);
}

TEST_CASE("envelope") {
  auto e = envelope("x", {{"seed", 3}}, nlohmann::json::array(), true);
  CHECK(e["tool"] == kToolName);
  CHECK(e["version"] == kVersion);
  CHECK(e["config"]["seed"] == 3);
  CHECK(e["pass"] == true);
}
