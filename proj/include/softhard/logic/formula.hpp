#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>

namespace softhard::logic {

// Input symbols are single bytes; strings over the alphabet are std::string.
using Symbol = char;

struct Formula;
struct CountTerm;
using FormulaPtr = std::shared_ptr<const Formula>;
using TermPtr = std::shared_ptr<const CountTerm>;

struct AtomQ {
  Symbol symbol;
};
struct Not {
  FormulaPtr arg;
};
struct And {
  FormulaPtr lhs, rhs;
};
struct Or {
  FormulaPtr lhs, rhs;
};
// Previous position (Y in the grammar).
struct Prev {
  FormulaPtr arg;
};
// Next position (X in the grammar).
struct Next {
  FormulaPtr arg;
};
struct Since {
  FormulaPtr lhs, rhs;
};
struct Until {
  FormulaPtr lhs, rhs;
};
// theta applied to the current position.
struct PredAtPos {
  std::string pred;
};
// theta applied to a counting term; the term must be CountLeft or CountRight.
struct PredOfCount {
  std::string pred;
  TermPtr count;
};
// lhs <= rhs.
struct Compare {
  TermPtr lhs, rhs;
};

struct Formula {
  std::variant<AtomQ, Not, And, Or, Prev, Next, Since, Until, PredAtPos,
               PredOfCount, Compare>
      node;
};

// Number of positions j <= i satisfying the formula.
struct CountLeft {
  FormulaPtr arg;
};
// Number of positions j >= i satisfying the formula.
struct CountRight {
  FormulaPtr arg;
};
struct Sum {
  TermPtr lhs, rhs;
};
struct Diff {
  TermPtr lhs, rhs;
};
struct One {};

struct CountTerm {
  std::variant<CountLeft, CountRight, Sum, Diff, One> node;
};

// Builders.
FormulaPtr atom(Symbol s);
FormulaPtr negate(FormulaPtr f);
FormulaPtr conj(FormulaPtr a, FormulaPtr b);
FormulaPtr disj(FormulaPtr a, FormulaPtr b);
FormulaPtr prev(FormulaPtr f);
FormulaPtr next(FormulaPtr f);
FormulaPtr since(FormulaPtr a, FormulaPtr b);
FormulaPtr until(FormulaPtr a, FormulaPtr b);
FormulaPtr pred(std::string name);
FormulaPtr pred_of(std::string name, TermPtr count);
FormulaPtr less_eq(TermPtr lhs, TermPtr rhs);

TermPtr count_left(FormulaPtr f);
TermPtr count_right(FormulaPtr f);
TermPtr plus(TermPtr a, TermPtr b);
TermPtr minus(TermPtr a, TermPtr b);
TermPtr one();
// k as 1 + 1 + ... + 1 (k >= 1) or 1 - 1 (k == 0).
TermPtr constant(std::int64_t k);

// Canonical text. Binary connectives are fully parenthesized, so the
// output re-parses to a structurally identical tree.
std::string to_string(const Formula& f);
std::string to_string(const CountTerm& t);

// Structural equality (via the canonical text, which is injective).
bool operator==(const Formula& a, const Formula& b);
bool operator==(const CountTerm& a, const CountTerm& b);

// Longest chain of nested operators; atoms and position predicates have
// depth 0.
int nesting_depth(const Formula& f);

}  // namespace softhard::logic
