#pragma once

#include <cstdint>
#include <vector>

#include "softhard/logic/formula.hpp"

namespace softhard::logic {

enum class CountDirection { Left, Right };

struct WeightedCount {
  std::int64_t coefficient;
  CountDirection direction;
  FormulaPtr formula;
};

// sum_k coefficient_k * #dir_k[formula_k] >= constant. `total` is the sum
// of |coefficient_k|; zero means the comparison is constant.
struct NormalizedComparison {
  std::vector<WeightedCount> terms;
  std::int64_t constant = 0;
  std::int64_t total = 0;

  bool is_constant() const { return total == 0; }
  // Only meaningful when is_constant().
  bool constant_value() const { return constant <= 0; }
};

// Rewrites lhs <= rhs into the weighted form above. Identical
// (direction, formula) leaves are merged and zero coefficients dropped;
// terms are ordered left-before-right, then by canonical formula text.
NormalizedComparison normalize_comparison(const CountTerm& lhs, const CountTerm& rhs);

}  // namespace softhard::logic
