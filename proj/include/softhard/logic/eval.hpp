#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "softhard/logic/formula.hpp"
#include "softhard/logic/predicates.hpp"

namespace softhard::logic {

// Reference semantics. Position k of the result is w,(k+1) |= f. Previous
// at the first position and next at the last position are false.
std::vector<bool> eval_formula(const Formula& f, std::string_view w,
                               const PredicateRegistry& registry);

// Value of t at the 1-based position i.
std::int64_t eval_count_term(const CountTerm& t, std::string_view w,
                             std::int64_t i, const PredicateRegistry& registry);

}  // namespace softhard::logic
