#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace softhard::srasp {

// Reserved out-of-alphabet symbol used as the retrieval default.
inline constexpr char kDefault = '?';

// k bracket types drawn from "()", "[]", "{}", "<>" in that order.
class BracketAlphabet {
 public:
  explicit BracketAlphabet(int k);

  int k() const { return k_; }
  // Left brackets followed by right brackets.
  const std::string& symbols() const { return symbols_; }

  bool contains(char c) const;
  bool left(char c) const;
  bool right(char c) const;
  // False iff a is a left bracket and b the matching right bracket.
  bool mismatch(char a, char b) const;

 private:
  int k_;
  std::string lefts_, rights_, symbols_;
};

using IntVector = std::vector<std::int64_t>;
using BoolVector = std::vector<bool>;

enum class Range { AtMost, Before, AtLeast };  // j <= i, j < i, j >= i

// Position i holds the sum of payload over the range.
IntVector attsum(Range range, const IntVector& payload);

// Position i holds payload(j) for the rightmost j in range with
// predicate(i, j), else the default. Positions are 1-based in the predicate.
template <typename T>
std::vector<T> attrdefault(Range range, const std::function<bool(std::size_t, std::size_t)>& predicate,
                           const std::vector<T>& payload, const T& fallback) {
  const std::size_t n = payload.size();
  std::vector<T> out(n, fallback);
  for (std::size_t i = 1; i <= n; ++i) {
    std::size_t hi = range == Range::Before ? i - 1 : (range == Range::AtMost ? i : n);
    std::size_t lo = range == Range::AtLeast ? i : 1;
    for (std::size_t j = hi; j >= lo && j >= 1; --j) {
      if (predicate(i, j)) {
        out[i - 1] = payload[j - 1];
        break;
      }
    }
  }
  return out;
}

// Every intermediate vector of the Dyck-k program.
struct DyckTrace {
  IntVector sleft, sright, diff, d;
  BoolVector er1, er2, okprefix, out;
  std::string check;
};

DyckTrace dyck_trace(std::string_view w, const BracketAlphabet& alphabet);
BoolVector dyck_program(std::string_view w, const BracketAlphabet& alphabet);

// Stack-based reference: out[i] iff w[1..i] is balanced.
BoolVector dyck_oracle(std::string_view w, const BracketAlphabet& alphabet);

}  // namespace softhard::srasp
