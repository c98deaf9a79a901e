#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "softhard/common/error.hpp"
#include "softhard/common/rng.hpp"
#include "softhard/transformer/forward.hpp"
#include "softhard/transformer/serialize.hpp"

using namespace softhard;
using namespace softhard::transformer;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double l1(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

double sum(const std::vector<double>& a) {
  double s = 0;
  for (double x : a) s += x;
  return s;
}

// Prop. 3.2(a): uniform future-masked attention over (-1)^(j+1), then
// 2 ReLU(m - 1/2) - 2 ReLU(m - 1).
TransformerSpec first_marker_spec() {
  TransformerSpec s;
  s.alphabet = "abc";
  s.d = 1;
  for (char c : s.alphabet) s.word_embedding[c] = Vector::Zero(1);
  s.positional.push_back({0, {PEFeature::Kind::AltSign, ""}});
  Layer l;
  l.attention.wq = Matrix::Zero(1, 1);
  l.attention.wk = Matrix::Zero(1, 1);
  l.attention.wv = Matrix::Constant(1, 1, -1.0);
  l.attention.mask = Mask::Future;
  l.attention.weighting = WeightingFn::softmax();
  l.ffn.w1 = Matrix::Constant(2, 1, 1.0);
  l.ffn.b1 = Vector(2);
  l.ffn.b1 << -0.5, -1.0;
  l.ffn.w2 = Matrix(1, 2);
  l.ffn.w2 << 2.0, -2.0;
  l.ffn.b2 = Vector::Zero(1);
  s.layers.push_back(l);
  return s;
}

Matrix random_matrix(Rng& rng, int r, int c) {
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = rng.uniform(-1, 1);
  return m;
}

}  // namespace

TEST_CASE("apply_weighting: hard variants") {
  std::vector<double> s = {1, 2, 2};
  CHECK(apply_weighting(WeightingFn::lhard(), s, 3, 3) == std::vector<double>{0, 1, 0});
  CHECK(apply_weighting(WeightingFn::rhard(), s, 3, 3) == std::vector<double>{0, 0, 1});
  CHECK(apply_weighting(WeightingFn::ahard(), s, 3, 3) == std::vector<double>{0, 0.5, 0.5});
}

TEST_CASE("apply_weighting: softmax with temperature") {
  auto half = apply_weighting(WeightingFn::softmax_tau(TemperatureFn::constant(1)),
                              std::vector<double>{0, 0}, 1, 2);
  CHECK(half == std::vector<double>{0.5, 0.5});
  auto sharp = apply_weighting(WeightingFn::softmax_tau(TemperatureFn::constant(0.1)),
                               std::vector<double>{1, 0}, 1, 2);
  double e = std::exp(-10.0);
  CHECK(sharp[0] == doctest::Approx(1 / (1 + e)).epsilon(1e-15));
  CHECK(sharp[1] == doctest::Approx(e / (1 + e)).epsilon(1e-12));
}

TEST_CASE("apply_weighting: masked entries and errors") {
  auto w = apply_weighting(WeightingFn::softmax(), std::vector<double>{3, -kInf, 3}, 1, 3);
  CHECK(w == std::vector<double>{0.5, 0, 0.5});
  CHECK_THROWS_AS(apply_weighting(WeightingFn::softmax(), std::vector<double>{-kInf, -kInf}, 1, 2),
                  PreconditionError);
  CHECK_THROWS_AS(apply_weighting(WeightingFn::ahard(), std::vector<double>{-kInf}, 1, 1),
                  PreconditionError);
  // Exponents far below the floor underflow to exactly zero.
  auto far = apply_weighting(WeightingFn::softmax_tau(TemperatureFn::inverse_length()),
                             std::vector<double>{0, -1000}, 1, 64);
  CHECK(far == std::vector<double>{1, 0});
}

TEST_CASE("temperature functions") {
  CHECK(TemperatureFn::inverse_length()(3, 8) == 0.125);
  CHECK(TemperatureFn::inverse_position_squared()(4, 8) == 1.0 / 16);
  CHECK(TemperatureFn::inverse_position()(5, 8) == doctest::Approx(0.2));
  CHECK(TemperatureFn::constant(0.3)(1, 100) == 0.3);
  CHECK(TemperatureFn::inverse_length().describe() == "1/n");
  CHECK(TemperatureFn::inverse_position_squared().describe() == "i^-2");
}

TEST_CASE("apply_weighting properties on random vectors") {
  Rng rng(21);
  std::vector<WeightingFn> all = {
      WeightingFn::softmax(), WeightingFn::softmax_tau(TemperatureFn::constant(0.05)),
      WeightingFn::softmax_tau(TemperatureFn::inverse_length()), WeightingFn::lhard(),
      WeightingFn::rhard(), WeightingFn::ahard()};
  for (int t = 0; t < 2000; ++t) {
    auto n = rng.integer(1, 40);
    std::vector<double> s(n);
    for (auto& x : s) x = rng.coin(0.2) ? std::round(rng.uniform(-3, 3)) : rng.uniform(-30, 30);
    if (n > 1 && rng.coin(0.3)) s[rng.integer(0, n - 1)] = -kInf;
    auto i = rng.integer(1, n);
    for (const auto& wf : all) {
      auto w = apply_weighting(wf, s, i, n);
      REQUIRE(std::abs(sum(w) - 1.0) <= 1e-12);
      for (double x : w) REQUIRE(x >= 0.0);
    }
    // Shift invariance.
    auto shifted = s;
    double c = rng.uniform(-50, 50);
    for (auto& x : shifted) x += c;
    auto wf = WeightingFn::softmax_tau(TemperatureFn::constant(rng.uniform(0.1, 3)));
    REQUIRE(l1(apply_weighting(wf, s, i, n), apply_weighting(wf, shifted, i, n)) <= 1e-12);
  }
}

TEST_CASE("tieless rows: hard variants agree and softmax_tau converges") {
  Rng rng(22);
  for (int t = 0; t < 300; ++t) {
    auto n = rng.integer(1, 20);
    std::vector<double> s(n);
    for (std::size_t j = 0; j < s.size(); ++j) s[j] = static_cast<double>(j) * 0.7 + rng.uniform(0, 0.5);
    for (std::size_t j = s.size(); j > 1; --j) std::swap(s[j - 1], s[rng.integer(0, j - 1)]);
    auto h = apply_weighting(WeightingFn::lhard(), s, 1, n);
    REQUIRE(h == apply_weighting(WeightingFn::rhard(), s, 1, n));
    REQUIRE(h == apply_weighting(WeightingFn::ahard(), s, 1, n));
    double last = 3.0;
    for (double tau : {1.0, 0.5, 0.25, 0.1, 0.05, 0.01}) {
      double dist = l1(h, apply_weighting(WeightingFn::softmax_tau(TemperatureFn::constant(tau)), s, 1, n));
      REQUIRE(dist <= last + 1e-15);
      last = dist;
    }
    REQUIRE(last < 1e-6);
  }
}

TEST_CASE("attention_layer examples") {
  Rng rng(23);
  Matrix h = random_matrix(rng, 5, 3);
  AttentionSpec a;
  a.wq = Matrix::Zero(2, 3);
  a.wk = Matrix::Zero(2, 3);
  a.wv = Matrix::Identity(3, 3);
  a.weighting = WeightingFn::softmax();
  Matrix c = attention_layer(a, h);
  for (int i = 0; i < 5; ++i) CHECK((c.row(i) - h.colwise().mean()).cwiseAbs().sum() < 1e-14);

  a.mask = Mask::Future;
  a.wv = random_matrix(rng, 3, 3);
  c = attention_layer(a, h);
  CHECK((c.row(0) - (a.wv * h.row(0).transpose()).transpose()).cwiseAbs().sum() < 1e-14);

  // Query constant one, key = coordinate 0; unique max at the largest entry.
  h.col(0) << 0.1, 0.9, 0.3, 0.2, 0.4;
  h.col(2).setOnes();
  AttentionSpec b;
  b.wq = Matrix::Zero(1, 3);
  b.wq(0, 2) = 1;
  b.wk = Matrix::Zero(1, 3);
  b.wk(0, 0) = 1;
  b.wv = Matrix::Identity(3, 3);
  b.weighting = WeightingFn::ahard();
  c = attention_layer(b, h);
  for (int i = 0; i < 5; ++i) CHECK(c.row(i) == h.row(1));

  AttentionSpec bad = b;
  bad.wv = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(attention_layer(bad, h), DimensionError);
}

TEST_CASE("forward: zero layers returns the embedding") {
  TransformerSpec s;
  s.alphabet = "ab";
  s.d = 3;
  s.word_embedding['a'] = Vector::Unit(3, 0);
  s.word_embedding['b'] = Vector::Unit(3, 1);
  s.positional.push_back({2, {PEFeature::Kind::InvLenPos, ""}});
  Matrix h = forward(s, "aba");
  Matrix expect(3, 3);
  expect << 1, 0, 1.0 / 3, 0, 1, 2.0 / 3, 1, 0, 1;
  CHECK(h == expect);
  CHECK_THROWS_AS(forward(s, ""), PreconditionError);
  CHECK_THROWS_AS(forward(s, "abc"), PreconditionError);
}

TEST_CASE("forward: first-position marker") {
  auto s = first_marker_spec();
  Matrix h = forward(s, "abc");
  CHECK(h(0, 0) == 1.0);
  CHECK(h(1, 0) == 0.0);
  CHECK(h(2, 0) == 0.0);
  for (int n = 1; n <= 12; ++n) {
    Matrix g = forward(s, std::string(n, 'b'));
    for (int i = 0; i < n; ++i) CHECK(g(i, 0) == (i == 0 ? 1.0 : 0.0));
  }
}

TEST_CASE("forward: deterministic and residual form") {
  auto s = first_marker_spec();
  CHECK(forward(s, "abcabc") == forward(s, "abcabc"));
  s.residual = true;
  // Residual form: c = h + SA(h), h' = c + FFN(c).
  Matrix h = forward(s, "ab");
  double c1 = -1.0 + 1.0;   // (-1)^1 + mean of (1)
  double c2 = 1.0 + 0.0;    // (-1)^2 + mean of (1, -1)
  auto ffn = [](double x) { return 2 * std::max(x - 0.5, 0.0) - 2 * std::max(x - 1.0, 0.0); };
  CHECK(h(0, 0) == c1 + ffn(c1));
  CHECK(h(1, 0) == c2 + ffn(c2));
}

TEST_CASE("accepts and readout verdicts") {
  auto s = first_marker_spec();
  CHECK(accepts(s, "a"));
  CHECK_FALSE(accepts(s, "ab"));
  CHECK_THROWS_AS(accepts(s, ""), PreconditionError);
  CHECK(readout_verdict(0.8));
  CHECK_FALSE(readout_verdict(0.2));
  CHECK_THROWS_AS(readout_verdict(0.5), ContractBreach);
}

TEST_CASE("validate rejects inconsistent specs") {
  auto s = first_marker_spec();
  s.positional.push_back({0, {PEFeature::Kind::Pos, ""}});
  CHECK_THROWS_AS(s.validate(), PreconditionError);
  s = first_marker_spec();
  s.layers[0].ffn.b2 = Vector::Zero(3);
  CHECK_THROWS_AS(s.validate(), DimensionError);
  s = first_marker_spec();
  s.positional.push_back({0, {PEFeature::Kind::PredBit, "NOPE"}});
  CHECK_THROWS(s.validate());
}

TEST_CASE("JSON round trip is exact") {
  Rng rng(24);
  auto s = first_marker_spec();
  s.layers[0].attention.wq = random_matrix(rng, 1, 1);
  s.layers[0].attention.weighting = WeightingFn::softmax_tau({TemperatureFn::Kind::PositionPower, 0.3, 2});
  s.layers[0].ffn.w1 = random_matrix(rng, 2, 1);
  s.positional.clear();
  s.d = 1;
  s.positional.push_back({0, {PEFeature::Kind::PredBit, "ODD"}});
  auto doc = to_json(s);
  auto back = spec_from_json(doc);
  CHECK(to_json(back).dump() == doc.dump());
  CHECK(back.layers[0].attention.wq == s.layers[0].attention.wq);
  CHECK(back.layers[0].ffn.w1 == s.layers[0].ffn.w1);
  CHECK(back.layers[0].attention.weighting == s.layers[0].attention.weighting);
  CHECK(forward(back, "abcab") == forward(s, "abcab"));
}

TEST_CASE("PE features") {
  logic::PredicateRegistry r;
  auto v = [&](PEFeature::Kind k) { return PEFeature{k, "ODD"}.value(3, 5, r); };
  CHECK(v(PEFeature::Kind::InvLenPos) == 0.6);
  CHECK(v(PEFeature::Kind::AltSign) == -1);
  CHECK(v(PEFeature::Kind::RecipPos) == 1.0 / 3);
  CHECK(v(PEFeature::Kind::RecipRevPos) == 1.0 / 3);
  CHECK(v(PEFeature::Kind::Pos) == 3);
  CHECK(v(PEFeature::Kind::PosSq) == 9);
  CHECK(v(PEFeature::Kind::Len) == 5);
  CHECK(v(PEFeature::Kind::PosLen) == 15);
  CHECK(v(PEFeature::Kind::PosSqLen) == 45);
  CHECK(v(PEFeature::Kind::PredBit) == 1);
  CHECK(PEFeature::from_name("i^2*n").kind == PEFeature::Kind::PosSqLen);
}
