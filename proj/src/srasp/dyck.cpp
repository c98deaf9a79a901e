#include "softhard/srasp/dyck.hpp"

#include "softhard/common/error.hpp"

namespace softhard::srasp {

BracketAlphabet::BracketAlphabet(int k) : k_(k) {
  static const std::string kLefts = "([{<", kRights = ")]}>";
  if (k < 1 || k > 4) throw PreconditionError("bracket type count must be in 1..4");
  lefts_ = kLefts.substr(0, static_cast<std::size_t>(k));
  rights_ = kRights.substr(0, static_cast<std::size_t>(k));
  symbols_ = lefts_ + rights_;
}

bool BracketAlphabet::contains(char c) const { return symbols_.find(c) != std::string::npos; }
bool BracketAlphabet::left(char c) const { return lefts_.find(c) != std::string::npos; }
bool BracketAlphabet::right(char c) const { return rights_.find(c) != std::string::npos; }

bool BracketAlphabet::mismatch(char a, char b) const {
  auto l = lefts_.find(a);
  auto r = rights_.find(b);
  return l == std::string::npos || r == std::string::npos || l != r;
}

IntVector attsum(Range range, const IntVector& payload) {
  const std::size_t n = payload.size();
  IntVector out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = range == Range::AtLeast ? i : 0;
    std::size_t hi = range == Range::AtLeast ? n : (range == Range::AtMost ? i + 1 : i);
    for (std::size_t j = lo; j < hi; ++j) out[i] += payload[j];
  }
  return out;
}

namespace {

void check_input(std::string_view w, const BracketAlphabet& alphabet) {
  if (w.empty()) throw PreconditionError("empty input");
  for (char c : w)
    if (!alphabet.contains(c)) throw PreconditionError(std::string("symbol not in alphabet: ") + c);
}

}  // namespace

DyckTrace dyck_trace(std::string_view w, const BracketAlphabet& alphabet) {
  check_input(w, alphabet);
  const std::size_t n = w.size();
  IntVector left(n), right(n);
  std::string in(w);
  for (std::size_t i = 0; i < n; ++i) {
    left[i] = alphabet.left(w[i]);
    right[i] = alphabet.right(w[i]);
  }

  DyckTrace t;
  t.sleft = attsum(Range::AtMost, left);
  t.sright = attsum(Range::AtMost, right);
  t.er1.resize(n);
  t.diff.resize(n);
  t.d.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    t.er1[i] = t.sright[i] > t.sleft[i];
    t.diff[i] = t.sleft[i] - t.sright[i];
    t.d[i] = t.diff[i] + right[i];
  }
  std::vector<char> symbols(in.begin(), in.end());
  auto check = attrdefault<char>(
      Range::Before, [&](std::size_t i, std::size_t j) { return t.d[j - 1] == t.d[i - 1]; }, symbols,
      kDefault);
  t.check.assign(check.begin(), check.end());
  t.er2.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.er2[i] = right[i] == 1 && alphabet.mismatch(t.check[i], w[i]);

  std::vector<bool> ok_payload(n, false);
  auto ok = attrdefault<bool>(
      Range::AtMost, [&](std::size_t, std::size_t j) { return t.er1[j - 1] || t.er2[j - 1]; },
      ok_payload, true);
  t.okprefix.assign(ok.begin(), ok.end());
  t.out.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.out[i] = t.okprefix[i] && t.diff[i] == 0;
  return t;
}

BoolVector dyck_program(std::string_view w, const BracketAlphabet& alphabet) {
  return dyck_trace(w, alphabet).out;
}

BoolVector dyck_oracle(std::string_view w, const BracketAlphabet& alphabet) {
  check_input(w, alphabet);
  BoolVector out(w.size(), false);
  std::string stack;
  bool broken = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    char c = w[i];
    if (!broken) {
      if (alphabet.left(c)) {
        stack.push_back(c);
      } else if (stack.empty() || alphabet.mismatch(stack.back(), c)) {
        broken = true;
      } else {
        stack.pop_back();
      }
    }
    out[i] = !broken && stack.empty();
  }
  return out;
}

}  // namespace softhard::srasp
