#include "softhard/logic/parser.hpp"

#include <cctype>
#include <fstream>
#include <optional>

#include "softhard/common/error.hpp"

namespace softhard::logic {

namespace {

enum class Cmp { Le, Lt, Ge, Gt, Eq, Ne };

class Parser {
 public:
  Parser(std::string_view text, std::string_view alphabet, const PredicateRegistry& registry)
      : text_(text), alphabet_(alphabet), registry_(registry) {}

  FormulaPtr run() {
    FormulaPtr f = disjunction();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(std::string_view tok) {
    skip_space();
    if (text_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  // Identifier at the cursor without consuming it.
  std::string_view peek_word() {
    skip_space();
    std::size_t end = pos_;
    if (end < text_.size() && ident_start(text_[end])) {
      while (end < text_.size() && ident_char(text_[end])) ++end;
    }
    return text_.substr(pos_, end - pos_);
  }

  bool accept_word(std::string_view w) {
    if (peek_word() == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  FormulaPtr disjunction() {
    FormulaPtr f = conjunction();
    while (peek() == '|') {
      ++pos_;
      f = disj(f, conjunction());
    }
    return f;
  }

  FormulaPtr conjunction() {
    FormulaPtr f = temporal();
    while (peek() == '&') {
      ++pos_;
      f = conj(f, temporal());
    }
    return f;
  }

  FormulaPtr temporal() {
    FormulaPtr f = unary();
    for (;;) {
      if (accept_word("S")) {
        f = since(f, unary());
      } else if (accept_word("U")) {
        f = until(f, unary());
      } else {
        return f;
      }
    }
  }

  FormulaPtr unary() {
    if (peek() == '!' && text_.substr(pos_, 2) != "!=") {
      ++pos_;
      return negate(unary());
    }
    if (accept_word("X")) return next(unary());
    if (accept_word("Y")) return prev(unary());
    return primary();
  }

  FormulaPtr primary() {
    skip_space();
    if (at_end()) fail("unexpected end of formula");
    char c = peek();
    if (c == '(') {
      std::size_t mark = pos_;
      try {
        return comparison();
      } catch (const ParseError&) {
        pos_ = mark;
      }
      expect("(");
      FormulaPtr f = disjunction();
      expect(")");
      return f;
    }
    if (c == '#' || std::isdigit(static_cast<unsigned char>(c))) return comparison();
    if (c == 'Q') {
      std::size_t start = pos_;
      ++pos_;
      Symbol sym;
      if (pos_ < text_.size() && text_[pos_] == '\'') {
        if (pos_ + 2 >= text_.size() || text_[pos_ + 2] != '\'') fail("malformed quoted symbol");
        sym = text_[pos_ + 1];
        pos_ += 3;
      } else {
        if (pos_ >= text_.size()) fail("missing symbol after Q");
        sym = text_[pos_++];
        if (pos_ < text_.size() && ident_char(text_[pos_]) && ident_char(sym)) {
          pos_ = start;
          fail("symbols are single characters");
        }
      }
      if (alphabet_.find(sym) == std::string_view::npos) {
        pos_ = start;
        fail("unknown symbol '" + std::string(1, sym) + "'");
      }
      return atom(sym);
    }
    std::string_view word = peek_word();
    if (word.empty()) fail("unexpected '" + std::string(1, c) + "'");
    if (!registry_.contains(word)) fail("unknown predicate " + std::string(word));
    std::string name(word);
    pos_ += word.size();
    if (peek() == '(') {
      ++pos_;
      TermPtr k = count();
      expect(")");
      return pred_of(name, k);
    }
    return pred(name);
  }

  TermPtr count() {
    if (accept("#L")) {
      expect("[");
      FormulaPtr f = disjunction();
      expect("]");
      return count_left(f);
    }
    if (accept("#R")) {
      expect("[");
      FormulaPtr f = disjunction();
      expect("]");
      return count_right(f);
    }
    fail("expected #L or #R");
  }

  TermPtr term() {
    TermPtr t = term_atom();
    for (;;) {
      if (accept("+")) {
        t = plus(t, term_atom());
      } else if (peek() == '-') {
        ++pos_;
        t = minus(t, term_atom());
      } else {
        return t;
      }
    }
  }

  TermPtr term_atom() {
    char c = peek();
    if (c == '#') return count();
    if (c == '(') {
      ++pos_;
      TermPtr t = term();
      expect(")");
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      std::int64_t v = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        v = v * 10 + (text_[pos_++] - '0');
        if (v > 1'000'000) {
          pos_ = start;
          fail("integer literal too large");
        }
      }
      return constant(v);
    }
    fail("expected a counting term");
  }

  std::optional<Cmp> comparator() {
    if (accept("<=")) return Cmp::Le;
    if (accept(">=")) return Cmp::Ge;
    if (accept("!=")) return Cmp::Ne;
    if (accept("<")) return Cmp::Lt;
    if (accept(">")) return Cmp::Gt;
    if (accept("=")) return Cmp::Eq;
    return std::nullopt;
  }

  FormulaPtr comparison() {
    TermPtr lhs = term();
    auto op = comparator();
    if (!op) fail("expected a comparison operator");
    TermPtr rhs = term();
    switch (*op) {
      case Cmp::Le: return less_eq(lhs, rhs);
      case Cmp::Lt: return less_eq(plus(lhs, one()), rhs);
      case Cmp::Ge: return less_eq(rhs, lhs);
      case Cmp::Gt: return less_eq(plus(rhs, one()), lhs);
      case Cmp::Eq: return conj(less_eq(lhs, rhs), less_eq(rhs, lhs));
      case Cmp::Ne: return negate(conj(less_eq(lhs, rhs), less_eq(rhs, lhs)));
    }
    fail("bad comparator");
  }

  std::string_view text_;
  std::string_view alphabet_;
  const PredicateRegistry& registry_;
  std::size_t pos_ = 0;
};

}  // namespace

FormulaPtr parse_formula(std::string_view text, std::string_view alphabet,
                         const PredicateRegistry& registry) {
  return Parser(text, alphabet, registry).run();
}

std::vector<FormulaPtr> parse_formula_file(const std::string& path, std::string_view alphabet,
                                           const PredicateRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::vector<FormulaPtr> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ';') continue;
    try {
      out.push_back(parse_formula(line, alphabet, registry));
    } catch (const ParseError& e) {
      std::string msg = e.what();
      msg = msg.substr(0, msg.rfind(" at offset"));
      throw ParseError(path + ":" + std::to_string(lineno) + ": " + msg, e.position);
    }
  }
  return out;
}

}  // namespace softhard::logic
