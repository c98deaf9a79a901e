#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "softhard/logic/formula.hpp"
#include "softhard/logic/predicates.hpp"

namespace softhard::logic {

// Grammar (lowest to highest precedence; binary operators associate left):
//
//   formula   := disj
//   disj      := conj { '|' conj }
//   conj      := temporal { '&' temporal }
//   temporal  := unary { ('S' | 'U') unary }
//   unary     := '!' unary | 'X' unary | 'Y' unary | primary
//   primary   := 'Q' SYM | PRED | PRED '(' count ')' | term CMP term
//              | '(' formula ')'
//   count     := '#L[' formula ']' | '#R[' formula ']'
//   term      := tatom { ('+' | '-') tatom }
//   tatom     := count | INT | '(' term ')'
//   CMP       := '<=' | '<' | '>=' | '>' | '=' | '!='
//
// X is next, Y is previous, S is since, U is until. `Qa` is the atom for
// symbol a; `Q'c'` quotes symbols that are not letters or digits. PRED is
// an identifier registered in the PredicateRegistry (it may not start
// with Q). Comparisons other than <= are sugar over <=, & and !.
FormulaPtr parse_formula(std::string_view text, std::string_view alphabet,
                         const PredicateRegistry& registry);

// One formula per non-blank line; lines whose first non-space character is
// ';' are comments.
std::vector<FormulaPtr> parse_formula_file(const std::string& path,
                                           std::string_view alphabet,
                                           const PredicateRegistry& registry);

}  // namespace softhard::logic
