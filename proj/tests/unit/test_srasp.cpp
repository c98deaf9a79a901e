#include <string>
#include <vector>

#include "doctest.h"
#include "softhard/common/error.hpp"
#include "softhard/common/rng.hpp"
#include "softhard/srasp/dyck.hpp"

using namespace softhard;
using namespace softhard::srasp;

namespace {

BoolVector B(std::initializer_list<int> v) {
  BoolVector out;
  for (int x : v) out.push_back(x != 0);
  return out;
}

std::vector<std::string> all_strings(const std::string& symbols, int len) {
  std::vector<std::string> out = {""};
  for (int l = 0; l < len; ++l) {
    std::vector<std::string> next;
    for (const auto& w : out)
      for (char c : symbols) next.push_back(w + c);
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST_CASE("attsum") {
  CHECK(attsum(Range::AtMost, {1, 0, 1}) == IntVector{1, 1, 2});
  CHECK(attsum(Range::AtMost, {0, 0, 0}) == IntVector{0, 0, 0});
  CHECK(attsum(Range::AtLeast, {1, 1}) == IntVector{2, 1});
  CHECK(attsum(Range::Before, {1, 2, 3}) == IntVector{0, 1, 3});
}

TEST_CASE("attrdefault") {
  std::vector<char> payload = {'a', 'b', 'c'};
  auto never = attrdefault<char>(Range::AtMost, [](std::size_t, std::size_t) { return false; }, payload, '?');
  CHECK(never == std::vector<char>{'?', '?', '?'});
  auto prev = attrdefault<char>(Range::Before, [](std::size_t, std::size_t) { return true; }, payload, '?');
  CHECK(prev == std::vector<char>{'?', 'a', 'b'});
  auto self = attrdefault<char>(Range::AtMost, [](std::size_t, std::size_t) { return true; }, payload, '?');
  CHECK(self == payload);
  auto later = attrdefault<char>(Range::AtLeast, [](std::size_t i, std::size_t j) { return j > i; }, payload, '?');
  CHECK(later == std::vector<char>{'c', 'c', '?'});
}

TEST_CASE("bracket alphabet") {
  BracketAlphabet two(2);
  CHECK(two.symbols() == "([)]");
  CHECK(two.left('['));
  CHECK(two.right(')'));
  CHECK_FALSE(two.mismatch('(', ')'));
  CHECK(two.mismatch('(', ']'));
  CHECK(two.mismatch(kDefault, ')'));
  CHECK_THROWS_AS(BracketAlphabet(5), PreconditionError);
}

TEST_CASE("program examples") {
  BracketAlphabet one(1), two(2);
  CHECK(dyck_program("()", one) == B({0, 1}));
  CHECK(dyck_program("(]", two) == B({0, 0}));
  CHECK(dyck_program("(())", one) == B({0, 0, 0, 1}));
  CHECK(dyck_oracle("()", one) == B({0, 1}));
  CHECK(dyck_oracle("(]", two) == B({0, 0}));
  CHECK(dyck_oracle("(())", one) == B({0, 0, 0, 1}));
  auto t = dyck_trace("()", one);
  CHECK(t.d == IntVector{1, 1});
  CHECK(t.check[1] == '(');
  CHECK(t.check[0] == kDefault);
  CHECK(dyck_trace("(]", two).er2 == B({0, 1}));
  CHECK_THROWS_AS(dyck_program("", one), PreconditionError);
  CHECK_THROWS_AS(dyck_program("(x", one), PreconditionError);
}

TEST_CASE("program matches the stack oracle exhaustively") {
  for (int k : {1, 2}) {
    BracketAlphabet a(k);
    for (int len = 1; len <= 8; ++len)
      for (const auto& w : all_strings(a.symbols(), len)) {
        INFO(w);
        CHECK(dyck_program(w, a) == dyck_oracle(w, a));
      }
  }
}

TEST_CASE("program matches the stack oracle on random strings") {
  for (int k : {3, 4}) {
    BracketAlphabet a(k);
    Rng rng(mix_seed(11, static_cast<std::uint64_t>(k)));
    for (int t = 0; t < 2000; ++t) {
      auto len = rng.integer(1, 32);
      std::string w;
      // Bias towards balanced prefixes so long accepted strings occur.
      std::string stack;
      for (std::int64_t i = 0; i < len; ++i) {
        if (!stack.empty() && rng.coin(0.45)) {
          char open = stack.back();
          stack.pop_back();
          auto pos = a.symbols().find(open);
          w += rng.coin(0.9) ? a.symbols()[pos + static_cast<std::size_t>(k)]
                             : a.symbols()[static_cast<std::size_t>(rng.integer(0, 2 * k - 1))];
        } else {
          char c = a.symbols()[static_cast<std::size_t>(rng.integer(0, 2 * k - 1))];
          if (a.left(c)) stack.push_back(c);
          w += c;
        }
      }
      INFO(w);
      CHECK(dyck_program(w, a) == dyck_oracle(w, a));
    }
  }
}

TEST_CASE("an early error rejects every later prefix") {
  BracketAlphabet a(2);
  for (const auto& w : all_strings(a.symbols(), 7)) {
    auto t = dyck_trace(w, a);
    bool seen = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
      seen = seen || t.er1[i] || t.er2[i];
      if (seen) CHECK_FALSE(t.out[i]);
      CHECK(t.okprefix[i] == !seen);
    }
  }
}
