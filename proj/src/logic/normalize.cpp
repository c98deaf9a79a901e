#include "softhard/logic/normalize.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <tuple>

#include "softhard/common/overloaded.hpp"

namespace softhard::logic {

namespace {

struct Linear {
  std::map<std::pair<CountDirection, std::string>, std::pair<std::int64_t, FormulaPtr>> coef;
  std::int64_t ones = 0;

  void add(const CountTerm& t, std::int64_t sign) {
    std::visit(overloaded{
                   [&](const CountLeft& x) { leaf(CountDirection::Left, x.arg, sign); },
                   [&](const CountRight& x) { leaf(CountDirection::Right, x.arg, sign); },
                   [&](const Sum& x) {
                     add(*x.lhs, sign);
                     add(*x.rhs, sign);
                   },
                   [&](const Diff& x) {
                     add(*x.lhs, sign);
                     add(*x.rhs, -sign);
                   },
                   [&](const One&) { ones += sign; },
               },
               t.node);
  }

  void leaf(CountDirection dir, const FormulaPtr& f, std::int64_t sign) {
    auto& slot = coef[{dir, to_string(*f)}];
    if (!slot.second) slot.second = f;
    slot.first += sign;
  }
};

}  // namespace

NormalizedComparison normalize_comparison(const CountTerm& lhs, const CountTerm& rhs) {
  // lhs <= rhs  <=>  rhs - lhs >= 0.
  Linear lin;
  lin.add(rhs, 1);
  lin.add(lhs, -1);
  NormalizedComparison out;
  out.constant = -lin.ones;
  for (const auto& [key, value] : lin.coef) {
    if (value.first == 0) continue;
    out.terms.push_back({value.first, key.first, value.second});
    out.total += value.first < 0 ? -value.first : value.first;
  }
  return out;
}

}  // namespace softhard::logic
