#include <cmath>
#include <limits>
#include <string>

#include "doctest.h"
#include "softhard/ahat/simulate.hpp"
#include "softhard/common/error.hpp"
#include "softhard/transformer/forward.hpp"

using namespace softhard;
using namespace softhard::ahat;

namespace {

const InputSource kAll = InputSource::exhaustive();

Calibration calibrated(const AhatSpec& u, std::int64_t n,
                       CalibrationMode mode = CalibrationMode::Analytic) {
  return calibrate(u, n, mode, InputSource::automatic(u.spec.alphabet.size(), n, 500, 3));
}

SimulationReport simulate(const AhatSpec& u, std::int64_t n, double tau_factor = 1.0) {
  auto src = InputSource::automatic(u.spec.alphabet.size(), n, 500, 3);
  auto plan = choose_temperature(calibrate(u, n, CalibrationMode::Analytic, src), u.spec.layers.size(), n);
  plan.tau *= tau_factor;
  return verify_simulation(u, to_smat(u, plan), plan, n, src);
}

// One tieless future-masked layer scoring the 0/1 symbol value.
AhatSpec boolean_scores() {
  AhatSpec u = counter_ahat();
  u.spec.layers.erase(u.spec.layers.begin());
  u.spec.layers[0].attention.wk = transformer::Matrix::Zero(1, 3);
  u.spec.layers[0].attention.wk(0, 1) = 1;
  u.spec.layers[0].attention.mask = transformer::Mask::Future;
  u.kinds = {LayerKind::Tieless};
  return u;
}

AhatSpec uniform_only() {
  AhatSpec u = counter_ahat();
  u.spec.layers.pop_back();
  u.kinds.pop_back();
  return u;
}

}  // namespace

TEST_CASE("flip-flop fixture tracks the last written bit") {
  auto u = flip_flop_ahat();
  transformer::Model m(u.spec);
  for (const auto& w : kAll.inputs(u.spec.alphabet, 6)) {
    auto h = m.forward(w);
    double state = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == '0' || w[i] == '1') state = w[i] == '1';
      CHECK(h(static_cast<Eigen::Index>(i), 2) == state);
    }
  }
}

TEST_CASE("counter fixture broadcasts the fraction of ones") {
  auto u = counter_ahat();
  auto h = transformer::forward(u.spec, "1101");
  for (int i = 0; i < 4; ++i) CHECK(h(i, 1) == doctest::Approx(0.75));
}

TEST_CASE("uniform-tieless check") {
  CHECK(check_uniform_tieless(flip_flop_ahat(), 4, kAll).ok);
  CHECK(check_uniform_tieless(counter_ahat(), 6, kAll).ok);

  auto mislabeled = counter_ahat();
  mislabeled.kinds[0] = LayerKind::Tieless;
  auto r = check_uniform_tieless(mislabeled, 3, kAll);
  CHECK_FALSE(r.ok);
  REQUIRE(r.witness);
  CHECK(r.witness->layer == 1);
  CHECK(r.witness->tied.size() == static_cast<std::size_t>(r.witness->position));

  auto fake_uniform = flip_flop_ahat();
  fake_uniform.kinds[0] = LayerKind::Uniform;
  CHECK_FALSE(check_uniform_tieless(fake_uniform, 2, kAll).ok);

  CHECK(check_uniform_tieless(boolean_scores(), 1, kAll).ok);
  CHECK_FALSE(check_uniform_tieless(boolean_scores(), 2, kAll).ok);
}

TEST_CASE("gap estimation") {
  for (std::int64_t n : {2, 4, 8}) {
    auto g = estimate_gap(flip_flop_ahat(), n, kAll);
    CHECK(g.defined);
    CHECK(g.exact);
    CHECK(g.gamma == doctest::Approx(1.0 / static_cast<double>(n)));
  }
  CHECK(estimate_gap(boolean_scores(), 5, kAll).gamma == 1.0);
  auto none = estimate_gap(uniform_only(), 4, kAll);
  CHECK_FALSE(none.defined);
  CHECK(std::isinf(none.gamma));
  CHECK_FALSE(estimate_gap(flip_flop_ahat(), 1, kAll).defined);
  CHECK_FALSE(estimate_gap(flip_flop_ahat(), 12, InputSource::sampled(50, 1)).exact);
}

TEST_CASE("calibration") {
  for (auto mode : {CalibrationMode::Analytic, CalibrationMode::Empirical}) {
    auto cal = calibrated(counter_ahat(), 5, mode);
    CHECK(cal.x_max >= 1);
    CHECK(cal.k1 >= 1);
    CHECK(cal.k2 >= 1);
    CHECK(cal.u_max.size() == 3);
    CHECK(cal.p_max == 1);
    CHECK(cal.gamma == doctest::Approx(0.1));
  }
  auto analytic = calibrated(counter_ahat(), 6, CalibrationMode::Analytic);
  auto empirical = calibrated(counter_ahat(), 6, CalibrationMode::Empirical);
  for (std::size_t l = 0; l < analytic.u_max.size(); ++l) CHECK(empirical.u_max[l] <= analytic.u_max[l]);
  CHECK(analytic.k1 >= empirical.k1);

  AhatSpec empty = flip_flop_ahat();
  empty.spec.layers.clear();
  empty.kinds.clear();
  auto cal = calibrated(empty, 3);
  REQUIRE(cal.u_max.size() == 1);
  CHECK(cal.u_max[0] == cal.x_max);
  CHECK(cal.k1 == 1);
  CHECK(cal.k2 == 1);
  auto plan = choose_temperature(cal, 0, 3);
  CHECK(plan.budgets.empty());
}

TEST_CASE("temperature plan") {
  auto cal = calibrated(flip_flop_ahat(), 8);
  auto plan = choose_temperature(cal, 1, 8);
  const double g = 0.125;
  REQUIRE(plan.budgets.size() == 1);
  CHECK(plan.budgets[0] == doctest::Approx(g / (4 * cal.k2 * cal.x_max)));
  CHECK(plan.tau ==
        doctest::Approx(g / (2 * std::log(4 * cal.k1 * cal.k2 * 8 * cal.x_max * cal.x_max / g))));

  auto two = calibrated(counter_ahat(), 4);
  auto p2 = choose_temperature(two, 2, 4);
  REQUIRE(p2.budgets.size() == 2);
  CHECK(p2.budgets[0] == doctest::Approx(p2.budgets[1] / (2 * two.k1)));
  CHECK(std::exp(-p2.gamma / (2 * p2.tau)) ==
        doctest::Approx(p2.budgets[0] / (two.k1 * 4 * two.x_max)));

  auto fixed = cal;
  double prev = std::numeric_limits<double>::infinity();
  for (std::int64_t n : {2, 4, 8, 16, 32}) {
    double tau = choose_temperature(fixed, 1, n).tau;
    CHECK(tau < prev);
    prev = tau;
  }

  auto bad = cal;
  bad.gamma = 0;
  CHECK_THROWS_AS(choose_temperature(bad, 1, 8), PreconditionError);
}

TEST_CASE("conversion keeps parameters") {
  auto u = counter_ahat();
  auto plan = choose_temperature(calibrated(u, 4), 2, 4);
  auto s = to_smat(u, plan);
  REQUIRE(s.layers.size() == u.spec.layers.size());
  for (std::size_t l = 0; l < s.layers.size(); ++l) {
    const auto& a = s.layers[l];
    const auto& b = u.spec.layers[l];
    CHECK(a.attention.wq == b.attention.wq);
    CHECK(a.attention.wk == b.attention.wk);
    CHECK(a.attention.wv == b.attention.wv);
    CHECK(a.ffn.w1 == b.ffn.w1);
    CHECK(a.ffn.b1 == b.ffn.b1);
    CHECK(a.ffn.w2 == b.ffn.w2);
    CHECK(a.ffn.b2 == b.ffn.b2);
    CHECK(a.attention.weighting.kind == transformer::WeightingFn::Kind::SoftmaxTau);
    CHECK(a.attention.weighting.tau(1, 4) == plan.tau);
  }
  transformer::Model hard(u.spec), soft(s);
  for (const auto& w : kAll.inputs("01", 5)) {
    auto h0 = hard.embed(w);
    CHECK(hard.attend(0, h0) == soft.attend(0, h0));
  }
}

TEST_CASE("simulation stays within the error budgets") {
  for (std::int64_t n = 1; n <= 8; ++n) {
    auto r = simulate(flip_flop_ahat(), n);
    INFO("n = " << n);
    CHECK(r.pass);
    CHECK(r.final_error <= 0.25);
    for (const auto& e : r.layers) CHECK(e.error <= e.budget);
  }
  CHECK(simulate(counter_ahat(), 10).pass);

  auto hot = simulate(flip_flop_ahat(), 8, 100.0);
  CHECK_FALSE(hot.pass);

  auto u = uniform_only();
  TemperaturePlan any;
  any.tau = 0.7;
  any.budgets = {0.0};
  auto r = verify_simulation(u, to_smat(u, any), any, 6, kAll);
  CHECK(r.final_error == 0.0);
  CHECK(r.pass);
}

TEST_CASE("lowering the temperature never increases the error") {
  auto u = flip_flop_ahat();
  const std::int64_t n = 6;
  auto src = InputSource::exhaustive();
  auto plan = choose_temperature(calibrate(u, n, CalibrationMode::Analytic, src), 1, n);
  double prev = std::numeric_limits<double>::infinity();
  for (double factor : {64.0, 16.0, 4.0, 1.0, 0.5, 0.25}) {
    auto p = plan;
    p.tau *= factor;
    double err = verify_simulation(u, to_smat(u, p), p, n, src).final_error;
    CHECK(err <= prev);
    prev = err;
  }
}

TEST_CASE("inverse temperature grows like n log n for the flip-flop") {
  std::vector<std::int64_t> ns = {4, 8, 16, 32, 64};
  std::vector<double> taus;
  for (auto n : ns) {
    auto cal = calibrate(flip_flop_ahat(), n, CalibrationMode::Analytic, InputSource::automatic(4, n, 300, 9));
    taus.push_back(choose_temperature(cal, 1, n).tau);
  }
  auto fit = fit_n_log_n(ns, taus);
  CHECK(fit.spread <= 4.0);
  CHECK(fit.c > 0);
}

TEST_CASE("fixture files") {
  const std::string dir = SOFTHARD_DATA_DIR;
  for (const auto& u : {flip_flop_ahat(), counter_ahat()}) {
    auto path = dir + "/ahat/" + (u.name == "flip-flop" ? "flip_flop" : u.name) + ".json";
    auto loaded = load_ahat(path);
    CHECK(to_json(loaded) == to_json(u));
  }
  auto bad = to_json(flip_flop_ahat());
  bad["layers"][0]["kind"] = "sparse";
  CHECK_THROWS_AS(ahat_from_json(bad), PreconditionError);
  auto soft = flip_flop_ahat();
  soft.spec.layers[0].attention.weighting = transformer::WeightingFn::softmax();
  CHECK_THROWS_AS(soft.validate(), PreconditionError);
}

TEST_CASE("input sources") {
  CHECK(kAll.inputs("ab", 3).size() == 8);
  CHECK(kAll.inputs("01ri", 8).size() == 65536);
  auto a = InputSource::sampled(20, 5).inputs("01", 30);
  auto b = InputSource::sampled(20, 5).inputs("01", 30);
  CHECK(a == b);
  CHECK(a.size() == 20);
  CHECK(InputSource::automatic(4, 8, 10, 1).kind == InputSource::Kind::Exhaustive);
  CHECK(InputSource::automatic(4, 9, 10, 1).kind == InputSource::Kind::Sampled);
  CHECK_THROWS_AS(kAll.inputs("01", 0), PreconditionError);
}
