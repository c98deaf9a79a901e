#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "softhard/transformer/spec.hpp"

namespace softhard::compiler {

// 2 ReLU(x - 1/4) - 2 ReLU(x - 3/4) as a one-coordinate FFN.
transformer::FFNSpec gadget_rounding_ffn();
double round_approx(double x);

enum class TieBreak {
  RightmostCausal,  // gamma n^2 (s_j - 1/j)
  Rightmost,        // 2 gamma n (s_j + j/(2n))
  Leftmost,         // 2 gamma n (s_j - j/(2n))
};

std::vector<double> gadget_tie_break(TieBreak variant, std::span<const double> scores, double gamma,
                                     std::int64_t n);

// Scores lambda (2cj - j^2) for j = 1..i and the softmax average of j.
std::vector<double> table_lookup_scores(std::int64_t c, std::int64_t i, double lambda);
double table_lookup_value(std::int64_t c, std::int64_t i, double lambda);

enum class Marker { First, Last };
enum class Direction { Forward, Backward };

// Small residual specs over `alphabet` whose readout coordinate holds the
// gadget's output at every position.
transformer::TransformerSpec gadget_mark_first_last(Marker which, const std::string& alphabet);
transformer::TransformerSpec gadget_reciprocal_position(Direction direction,
                                                        const std::string& alphabet);

}  // namespace softhard::compiler
