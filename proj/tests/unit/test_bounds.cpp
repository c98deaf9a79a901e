#include <cmath>
#include <vector>

#include "doctest.h"
#include "softhard/bounds/bounds.hpp"

using namespace softhard;
using namespace softhard::bounds;

TEST_CASE("softmax bound examples") {
  const double g = 2;
  CHECK(softmax_distance_to_hardmax({0, -g, -2 * g}) <= 4 * std::exp(-g));
  CHECK(softmax_distance_to_hardmax({3.5}) == 0.0);
  double prev = 2;
  for (double gamma : {1.0, 5.0, 20.0, 80.0, 800.0}) {
    double d = softmax_distance_to_hardmax({0, -gamma, -2 * gamma, -3 * gamma});
    CHECK(d <= prev);
    prev = d;
  }
  CHECK(prev == 0.0);
}

TEST_CASE("softmax tau bound examples") {
  const double gamma = 1;
  for (int n : {1, 2, 8, 64}) {
    std::vector<double> s(static_cast<std::size_t>(n), -gamma);
    s[0] = 0;
    double tau = gamma / std::log(8.0 * n);
    double bound = 2.0 * n * std::exp(-gamma / tau);
    CHECK(bound == doctest::Approx(0.25));
    CHECK(softmax_tau_distance(s, 0, tau) <= bound);
  }
  CHECK(softmax_tau_distance({1.0}, 0, 0.3) == 0.0);
}

TEST_CASE("every bound holds on seeded instances") {
  for (const auto& r : check_all(1000, 20240601)) {
    INFO(r.lemma << " worst " << r.worst << " bound " << r.bound_at_worst);
    CHECK(r.trials == 1000);
    CHECK(r.violations == 0);
    CHECK(r.ok());
    CHECK(r.margin >= -1e-12 * r.bound_at_worst);
    CHECK(r.max_ratio <= 1 + kRoundoff);
    for (const auto& p : r.parts) {
      INFO(p.lemma);
      CHECK(p.violations == 0);
    }
  }
}

TEST_CASE("bounds are not vacuous") {
  for (const auto& r : check_all(1000, 7)) {
    INFO(r.lemma << " max ratio " << r.max_ratio);
    CHECK(r.tight());
  }
}

TEST_CASE("reports are reproducible") {
  auto a = check_all(200, 99);
  auto b = check_all(200, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(to_json(a[k]).dump() == to_json(b[k]).dump());
  CHECK(to_json(check_table_lookup(200, 98)).dump() != to_json(check_table_lookup(200, 99)).dump());
}

TEST_CASE("propagation report bundles its parts") {
  auto r = check_error_propagation(100, 5);
  REQUIRE(r.parts.size() == 5);
  CHECK(r.parts[0].lemma == "linear_map");
  CHECK(r.parts[4].lemma == "weighted_sum");
  auto doc = to_json(r);
  CHECK(doc["parts"].size() == 5);
}
