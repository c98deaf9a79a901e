#include "softhard/logic/formula.hpp"

#include <algorithm>
#include <cctype>

#include "softhard/common/error.hpp"
#include "softhard/common/overloaded.hpp"

namespace softhard::logic {

namespace {

FormulaPtr make(auto node) { return std::make_shared<const Formula>(Formula{std::move(node)}); }
TermPtr make_term(auto node) {
  return std::make_shared<const CountTerm>(CountTerm{std::move(node)});
}

void require(const auto& p, const char* what) {
  if (!p) throw PreconditionError(std::string("null operand for ") + what);
}

std::string symbol_text(Symbol s) {
  if (std::isalnum(static_cast<unsigned char>(s))) return std::string("Q") + s;
  return std::string("Q'") + s + "'";
}

}  // namespace

FormulaPtr atom(Symbol s) { return make(AtomQ{s}); }
FormulaPtr negate(FormulaPtr f) {
  require(f, "!");
  return make(Not{std::move(f)});
}
FormulaPtr conj(FormulaPtr a, FormulaPtr b) {
  require(a, "&");
  require(b, "&");
  return make(And{std::move(a), std::move(b)});
}
FormulaPtr disj(FormulaPtr a, FormulaPtr b) {
  require(a, "|");
  require(b, "|");
  return make(Or{std::move(a), std::move(b)});
}
FormulaPtr prev(FormulaPtr f) {
  require(f, "Y");
  return make(Prev{std::move(f)});
}
FormulaPtr next(FormulaPtr f) {
  require(f, "X");
  return make(Next{std::move(f)});
}
FormulaPtr since(FormulaPtr a, FormulaPtr b) {
  require(a, "S");
  require(b, "S");
  return make(Since{std::move(a), std::move(b)});
}
FormulaPtr until(FormulaPtr a, FormulaPtr b) {
  require(a, "U");
  require(b, "U");
  return make(Until{std::move(a), std::move(b)});
}
FormulaPtr pred(std::string name) { return make(PredAtPos{std::move(name)}); }
FormulaPtr pred_of(std::string name, TermPtr count) {
  require(count, "predicate application");
  bool leaf = std::holds_alternative<CountLeft>(count->node) ||
              std::holds_alternative<CountRight>(count->node);
  if (!leaf) throw PreconditionError("predicate " + name + " must be applied to #L or #R");
  return make(PredOfCount{std::move(name), std::move(count)});
}
FormulaPtr less_eq(TermPtr lhs, TermPtr rhs) {
  require(lhs, "<=");
  require(rhs, "<=");
  return make(Compare{std::move(lhs), std::move(rhs)});
}

TermPtr count_left(FormulaPtr f) {
  require(f, "#L");
  return make_term(CountLeft{std::move(f)});
}
TermPtr count_right(FormulaPtr f) {
  require(f, "#R");
  return make_term(CountRight{std::move(f)});
}
TermPtr plus(TermPtr a, TermPtr b) {
  require(a, "+");
  require(b, "+");
  return make_term(Sum{std::move(a), std::move(b)});
}
TermPtr minus(TermPtr a, TermPtr b) {
  require(a, "-");
  require(b, "-");
  return make_term(Diff{std::move(a), std::move(b)});
}
TermPtr one() { return make_term(One{}); }

TermPtr constant(std::int64_t k) {
  if (k < 0) throw PreconditionError("negative integer literal");
  if (k == 0) return minus(one(), one());
  TermPtr t = one();
  for (std::int64_t i = 1; i < k; ++i) t = plus(t, one());
  return t;
}

std::string to_string(const Formula& f) {
  return std::visit(
      overloaded{
          [](const AtomQ& x) { return symbol_text(x.symbol); },
          [](const Not& x) { return "!" + to_string(*x.arg); },
          [](const And& x) { return "(" + to_string(*x.lhs) + " & " + to_string(*x.rhs) + ")"; },
          [](const Or& x) { return "(" + to_string(*x.lhs) + " | " + to_string(*x.rhs) + ")"; },
          [](const Prev& x) { return "Y " + to_string(*x.arg); },
          [](const Next& x) { return "X " + to_string(*x.arg); },
          [](const Since& x) { return "(" + to_string(*x.lhs) + " S " + to_string(*x.rhs) + ")"; },
          [](const Until& x) { return "(" + to_string(*x.lhs) + " U " + to_string(*x.rhs) + ")"; },
          [](const PredAtPos& x) { return x.pred; },
          [](const PredOfCount& x) { return x.pred + "(" + to_string(*x.count) + ")"; },
          [](const Compare& x) {
            return "(" + to_string(*x.lhs) + " <= " + to_string(*x.rhs) + ")";
          },
      },
      f.node);
}

std::string to_string(const CountTerm& t) {
  return std::visit(
      overloaded{
          [](const CountLeft& x) { return "#L[" + to_string(*x.arg) + "]"; },
          [](const CountRight& x) { return "#R[" + to_string(*x.arg) + "]"; },
          [](const Sum& x) { return "(" + to_string(*x.lhs) + " + " + to_string(*x.rhs) + ")"; },
          [](const Diff& x) { return "(" + to_string(*x.lhs) + " - " + to_string(*x.rhs) + ")"; },
          [](const One&) { return std::string("1"); },
      },
      t.node);
}

bool operator==(const Formula& a, const Formula& b) { return to_string(a) == to_string(b); }
bool operator==(const CountTerm& a, const CountTerm& b) { return to_string(a) == to_string(b); }

namespace {

int term_depth(const CountTerm& t);

}  // namespace

int nesting_depth(const Formula& f) {
  return std::visit(
      overloaded{
          [](const AtomQ&) { return 0; },
          [](const PredAtPos&) { return 0; },
          [](const Not& x) { return 1 + nesting_depth(*x.arg); },
          [](const Prev& x) { return 1 + nesting_depth(*x.arg); },
          [](const Next& x) { return 1 + nesting_depth(*x.arg); },
          [](const And& x) { return 1 + std::max(nesting_depth(*x.lhs), nesting_depth(*x.rhs)); },
          [](const Or& x) { return 1 + std::max(nesting_depth(*x.lhs), nesting_depth(*x.rhs)); },
          [](const Since& x) {
            return 1 + std::max(nesting_depth(*x.lhs), nesting_depth(*x.rhs));
          },
          [](const Until& x) {
            return 1 + std::max(nesting_depth(*x.lhs), nesting_depth(*x.rhs));
          },
          [](const PredOfCount& x) { return 1 + term_depth(*x.count); },
          [](const Compare& x) { return 1 + std::max(term_depth(*x.lhs), term_depth(*x.rhs)); },
      },
      f.node);
}

namespace {

int term_depth(const CountTerm& t) {
  return std::visit(
      overloaded{
          [](const CountLeft& x) { return 1 + nesting_depth(*x.arg); },
          [](const CountRight& x) { return 1 + nesting_depth(*x.arg); },
          [](const Sum& x) { return std::max(term_depth(*x.lhs), term_depth(*x.rhs)); },
          [](const Diff& x) { return std::max(term_depth(*x.lhs), term_depth(*x.rhs)); },
          [](const One&) { return 0; },
      },
      t.node);
}

}  // namespace

}  // namespace softhard::logic
