#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "softhard/common/error.hpp"
#include "softhard/compiler/audit.hpp"
#include "softhard/compiler/compile.hpp"
#include "softhard/compiler/gadgets.hpp"
#include "softhard/logic/eval.hpp"
#include "softhard/logic/parser.hpp"
#include "softhard/transformer/forward.hpp"

using namespace softhard;
using namespace softhard::compiler;

namespace {

const logic::PredicateRegistry& reg() {
  static const logic::PredicateRegistry r;
  return r;
}

logic::FormulaPtr P(const std::string& text) { return logic::parse_formula(text, "01", reg()); }

constexpr CompileMode kTempAny{Scaling::TempScaling, Masking::Any};
constexpr CompileMode kTempFuture{Scaling::TempScaling, Masking::FutureOnly};
constexpr CompileMode kPeAny{Scaling::UnboundedPE, Masking::Any};
constexpr CompileMode kPeFuture{Scaling::UnboundedPE, Masking::FutureOnly};

std::vector<std::string> binary_strings(int max_len) {
  std::vector<std::string> out;
  for (int n = 1; n <= max_len; ++n)
    for (int m = 0; m < (1 << n); ++m) {
      std::string w;
      for (int i = 0; i < n; ++i) w += ((m >> i) & 1) ? '1' : '0';
      out.push_back(w);
    }
  return out;
}

std::vector<double> softmax(const std::vector<double>& s) {
  return transformer::apply_weighting(transformer::WeightingFn::softmax(), s, 1,
                                      static_cast<std::int64_t>(s.size()));
}

// Counts positions where the compiled readout differs from the oracle.
int mismatches(const CompiledFormula& cf, const std::vector<std::string>& words) {
  transformer::Model model(cf.spec);
  int bad = 0;
  for (const auto& w : words) {
    auto h = model.forward(w);
    auto truth = logic::eval_formula(*cf.formula, w, reg());
    for (std::size_t i = 0; i < w.size(); ++i)
      if (h(static_cast<Eigen::Index>(i), cf.spec.readout) != (truth[i] ? 1.0 : 0.0)) ++bad;
  }
  return bad;
}

std::vector<double> column(const transformer::ActivationSequence& h, int c) {
  std::vector<double> out(static_cast<std::size_t>(h.rows()));
  for (Eigen::Index i = 0; i < h.rows(); ++i) out[static_cast<std::size_t>(i)] = h(i, c);
  return out;
}

}  // namespace

TEST_CASE("rounding gadget") {
  CHECK(round_approx(0.1) == 0.0);
  CHECK(round_approx(0.9) == 1.0);
  CHECK(round_approx(0.5) == doctest::Approx(0.5));
  CHECK(round_approx(-3.0) == 0.0);
  CHECK(round_approx(7.0) == 1.0);
  auto ffn = gadget_rounding_ffn();
  CHECK(ffn.w1.cols() == 1);
  CHECK(ffn.w2.rows() == 1);
}

TEST_CASE("tie-break gadget examples") {
  const double bound = 4 * std::exp(-3.0);
  std::vector<double> s = {1, 0, 1};
  auto b = gadget_tie_break(TieBreak::Rightmost, s, 3, 3);
  REQUIRE(b.size() == 3);
  CHECK(b[0] == doctest::Approx(21));
  CHECK(b[1] == doctest::Approx(6));
  CHECK(b[2] == doctest::Approx(27));
  CHECK(softmax(b)[2] >= 1 - bound);

  auto c = gadget_tie_break(TieBreak::Leftmost, s, 3, 3);
  CHECK(softmax(c)[0] >= 1 - bound);

  std::vector<double> flat(5, 0.0);
  auto a = softmax(gadget_tie_break(TieBreak::RightmostCausal, flat, 3, 5));
  CHECK(std::max_element(a.begin(), a.end()) - a.begin() == 4);
  CHECK(a[4] >= 1 - bound);

  CHECK_THROWS_AS(gadget_tie_break(TieBreak::Rightmost, s, 0, 3), PreconditionError);
}

TEST_CASE("table lookup gadget") {
  auto s = table_lookup_scores(2, 4, 3);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == doctest::Approx(9));
  CHECK(s[1] == doctest::Approx(12));
  CHECK(s[2] == doctest::Approx(9));
  CHECK(s[3] == doctest::Approx(0));
  CHECK(std::abs(table_lookup_value(2, 4, 3) - 2) <= 1.5 * std::exp(-3.0));
  CHECK(table_lookup_value(1, 1, 0.5) == 1.0);
  CHECK(table_lookup_value(1, 1, 7) == 1.0);
  CHECK(std::abs(table_lookup_value(8, 8, 3) - 8) <= 1.5 * std::exp(-3.0));
  for (int i = 1; i <= 20; ++i)
    for (int c = 1; c <= i; ++c)
      CHECK(std::abs(table_lookup_value(c, i, 1) - c) <= 1.5 * std::exp(-1.0));
}

TEST_CASE("first and last markers") {
  auto first = gadget_mark_first_last(Marker::First, "ab");
  auto last = gadget_mark_first_last(Marker::Last, "ab");
  CHECK(column(transformer::forward(first, "aba"), first.readout) == std::vector<double>{1, 0, 0});
  CHECK(column(transformer::forward(last, "aba"), last.readout) == std::vector<double>{0, 0, 1});
  CHECK(column(transformer::forward(first, "b"), first.readout) == std::vector<double>{1});
  CHECK(column(transformer::forward(last, "b"), last.readout) == std::vector<double>{1});
  for (int n = 1; n <= 12; ++n) {
    auto f = column(transformer::forward(first, std::string(n, 'a')), first.readout);
    auto l = column(transformer::forward(last, std::string(n, 'b')), last.readout);
    for (int i = 0; i < n; ++i) {
      CHECK(f[i] == (i == 0 ? 1.0 : 0.0));
      CHECK(l[i] == (i == n - 1 ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("reciprocal position gadget") {
  auto fwd = gadget_reciprocal_position(Direction::Forward, "ab");
  auto bwd = gadget_reciprocal_position(Direction::Backward, "ab");
  auto f = column(transformer::forward(fwd, "abba"), fwd.readout);
  auto b = column(transformer::forward(bwd, "abba"), bwd.readout);
  for (int i = 0; i < 4; ++i) {
    CHECK(f[i] == doctest::Approx(1.0 / (i + 1)).epsilon(1e-12));
    CHECK(b[i] == doctest::Approx(1.0 / (4 - i)).epsilon(1e-12));
  }
  CHECK(column(transformer::forward(fwd, "a"), fwd.readout)[0] == doctest::Approx(1.0));
}

TEST_CASE("compiled 3-gram detector matches the oracle") {
  auto f = P("Q1 & X Q1 & X X Q0");
  for (auto mode : {kTempAny, kPeAny}) {
    auto cf = compile(f, mode, reg());
    CHECK(mismatches(cf, binary_strings(6)) == 0);
    auto h = transformer::forward(cf.spec, "1101");
    CHECK(column(h, cf.spec.readout) == std::vector<double>{1, 0, 0, 0});
  }
  auto cf = compile(f, kTempAny, reg());
  CHECK(cf.tau.describe() == "1/n");
  auto has = [&](transformer::PEFeature::Kind k) {
    return std::any_of(cf.pe_features.begin(), cf.pe_features.end(),
                       [&](const auto& p) { return p.kind == k; });
  };
  CHECK(has(transformer::PEFeature::Kind::InvLenPos));
  CHECK(has(transformer::PEFeature::Kind::AltSign));
}

TEST_CASE("compiled formulas across fragments and modes") {
  const std::vector<std::string> suite = {
      "Y Q1",           "X Q0",           "Y Y Q0 | Q1",        "Q1 S Q0",          "(Q0 | Q1) S Q1",
      "Q1 U Q0",        "!(Q0 U (Q1 & X Q1))", "ODD(#L[Q1])",   "ODD(#R[Q0])",      "#L[Q1] <= #R[Q0] + 1",
      "#L[Q1] > #L[Q0]", "Y (Q1 S Y Q0)", "ODD",                "ODD(#L[Q0 S Q1])", "#L[Y Q1] = 2",
  };
  const auto words = binary_strings(7);
  for (const auto& text : suite) {
    auto f = P(text);
    for (auto mode : {kTempAny, kTempFuture, kPeAny, kPeFuture}) {
      CompiledFormula cf;
      try {
        cf = compile(f, mode, reg());
      } catch (const ModeError&) {
        continue;
      }
      INFO(text << " " << mode.describe());
      CHECK(mismatches(cf, words) == 0);
    }
  }
}

TEST_CASE("parity formulas accept exactly the odd-ones strings") {
  const auto words = binary_strings(10);
  for (const std::string text : {"ODD(#L[Q1])", "#L[#L[Y Q1] = #R[Q1]] = 0"}) {
    for (auto mode : {kTempAny, kPeAny}) {
      auto cf = compile(P(text), mode, reg());
      transformer::Model model(cf.spec);
      int bad = 0;
      for (const auto& w : words) {
        bool odd = std::count(w.begin(), w.end(), '1') % 2 == 1;
        if (model.accepts(w) != odd) ++bad;
      }
      INFO(text << " " << mode.describe());
      CHECK(bad == 0);
    }
  }
  auto cf = compile(P("ODD(#L[Q1])"), kTempAny, reg());
  CHECK(transformer::accepts(cf.spec, "1"));
  CHECK_FALSE(transformer::accepts(cf.spec, "11"));
  CHECK_THROWS_AS(transformer::accepts(cf.spec, ""), PreconditionError);
  CHECK(std::any_of(cf.pe_features.begin(), cf.pe_features.end(), [](const auto& p) {
    return p.kind == transformer::PEFeature::Kind::PredBit && p.pred == "ODD";
  }));
}

TEST_CASE("temperature and scaling modes produce identical coordinate streams") {
  for (const std::string text : {"Q1 & X Q1 & X X Q0", "Q1 S Y Q0", "#L[Q1] <= #R[Q0] + 1"}) {
    auto f = P(text);
    auto a = compile(f, kTempAny, reg());
    auto b = compile(f, kPeAny, reg());
    transformer::Model ma(a.spec), mb(b.spec);
    for (const auto& w : binary_strings(6)) {
      auto ha = ma.forward(w);
      auto hb = mb.forward(w);
      for (const auto& [key, ca] : a.coordinates) {
        auto it = b.coordinates.find(key);
        REQUIRE(it != b.coordinates.end());
        CHECK(column(ha, ca) == column(hb, it->second));
      }
    }
  }
}

TEST_CASE("subformula coordinates hold exact Booleans") {
  auto f = P("Y (Q1 S Y Q0) & ODD(#L[Q1])");
  auto cf = compile(f, kTempFuture, reg());
  transformer::Model model(cf.spec);
  for (const auto& w : binary_strings(6)) {
    auto h = model.forward(w);
    for (const auto& [key, c] : cf.coordinates) {
      auto truth = logic::eval_formula(*P(key), w, reg());
      for (std::size_t i = 0; i < w.size(); ++i)
        CHECK(h(static_cast<Eigen::Index>(i), c) == (truth[i] ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("error audit") {
  auto tri = compile(P("Q1 & X Q1 & X X Q0"), kTempAny, reg());
  auto r = compiled_error_audit(tri, "1101");
  CHECK(r.ok);
  CHECK(r.worst <= 4 * std::exp(-3.0));

  auto atom = compile(P("Q1 & !Q0"), kTempAny, reg());
  CHECK(compiled_error_audit(atom, "0110").worst == 0.0);

  auto parity = compile(P("#L[#L[Y Q1] = #R[Q1]] = 0"), kTempAny, reg());
  auto pr = compiled_error_audit(parity, "1111");
  CHECK(pr.ok);
  CHECK(pr.worst <= 0.25);
  CHECK_FALSE(pr.entries.empty());

  CHECK(probe_deviation(Probe::Kind::Boolean, 0.1) == doctest::Approx(0.1));
  CHECK(probe_deviation(Probe::Kind::Boolean, 1.2) == 0.0);
  CHECK(probe_deviation(Probe::Kind::Integer, 2.9) == doctest::Approx(0.1));
}

TEST_CASE("audit detects a misconfigured temperature") {
  auto cf = compile(P("Y Q1"), kTempAny, reg());
  for (auto& layer : cf.spec.layers)
    if (layer.attention.weighting.kind == transformer::WeightingFn::Kind::SoftmaxTau)
      layer.attention.weighting.tau = transformer::TemperatureFn::constant(50.0);
  CHECK_THROWS_AS(compiled_error_audit(cf, "0101101"), ContractBreach);
}

TEST_CASE("mode gate") {
  CHECK_THROWS_AS(compile(P("Q1 U Q0"), kTempFuture, reg()), ModeError);
  CHECK_THROWS_AS(compile(P("X Q1"), kTempFuture, reg()), ModeError);
  CHECK_THROWS_AS(compile(P("ODD(#R[Q1])"), kTempFuture, reg()), ModeError);
  CHECK_NOTHROW(compile(P("Y Q1 & (Q1 S Q0)"), kTempFuture, reg()));
  CompileOptions bad;
  bad.gamma = 0;
  CHECK_THROWS_AS(compile(P("Y Q1"), kTempAny, reg(), bad), PreconditionError);
}

TEST_CASE("constant comparisons fold") {
  auto cf = compile(P("#L[Q0] <= #L[Q0]"), kTempAny, reg());
  CHECK(cf.spec.layers.empty());
  CHECK(mismatches(cf, binary_strings(4)) == 0);
  auto no = compile(P("#L[Q0] + 1 <= #L[Q0]"), kTempAny, reg());
  CHECK(mismatches(no, binary_strings(4)) == 0);
}

TEST_CASE("temperature choice follows the masking policy") {
  CHECK(compile(P("Y Q1"), kTempAny, reg()).tau.describe() == "1/n");
  CHECK(compile(P("Y Q1"), kTempFuture, reg()).tau.describe() == "i^-2");
  CHECK(compile(P("ODD(#L[Q1])"), kTempFuture, reg()).tau.describe() == "1/i");
  CHECK(compile(P("Y Q1"), kPeAny, reg()).tau.describe() == "1");
}
