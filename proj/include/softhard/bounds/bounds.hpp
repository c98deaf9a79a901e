#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"  // nlohmann
#include "softhard/compiler/gadgets.hpp"

namespace softhard::bounds {

// Result of checking one closed-form bound on randomly generated instances
// that satisfy its hypotheses by construction.
struct BoundReport {
  std::string lemma;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  // The trial with the largest empirical / bound ratio.
  double worst = 0;
  double bound_at_worst = 0;
  double margin = 0;  // bound_at_worst - worst
  double max_ratio = 0;
  std::size_t violations = 0;
  // Sub-checks, for reports that bundle several bounds.
  std::vector<BoundReport> parts;

  bool ok() const { return violations == 0; }
  // At least one instance reached 1% of its bound.
  bool tight() const { return max_ratio >= 0.01; }
};

nlohmann::json to_json(const BoundReport& r);

// Relative slack allowed for floating-point rounding when comparing an
// empirical value with its bound.
inline constexpr double kRoundoff = 1e-12;

// Scores with s_j <= s_j* - |j - j*| gamma: l1 distance between hardmax and
// softmax is at most 4 e^-gamma.
BoundReport check_softmax_bound(std::size_t trials, std::uint64_t seed);

// s_j = lambda (2cj - j^2): |c - sum_j alpha_j j| <= (3/2) e^-lambda.
BoundReport check_table_lookup(std::size_t trials, std::uint64_t seed);

// 0/1 scores with a tie-breaking transform: l1 distance to rhardmax
// (causal, rightmost) or lhardmax (leftmost) is at most 4 e^-gamma.
BoundReport check_tie_break(compiler::TieBreak variant, std::size_t trials, std::uint64_t seed);

// s_1 >= M - eps and s_i <= M - gamma + eps: l1 distance from the one-hot
// target to softmax_tau(s) is at most 2n e^(-(gamma - 2 eps) / tau).
BoundReport check_softmax_tau_bound(std::size_t trials, std::uint64_t seed);

// Linear map, FFN, uniform attention, attention score and weighted sum
// error bounds, one part each.
BoundReport check_error_propagation(std::size_t trials, std::uint64_t seed);

// Every check above at the given trial count and seed.
std::vector<BoundReport> check_all(std::size_t trials, std::uint64_t seed);

// Single-instance helpers shared with the tests.
double softmax_distance_to_hardmax(const std::vector<double>& scores);
double softmax_tau_distance(const std::vector<double>& scores, std::size_t target, double tau);

}  // namespace softhard::bounds
