#include "softhard/compiler/compile.hpp"

#include <algorithm>
#include <cstdlib>

#include "builder.hpp"
#include "softhard/common/error.hpp"
#include "softhard/common/overloaded.hpp"
#include "softhard/logic/fragment.hpp"
#include "softhard/logic/normalize.hpp"

namespace softhard::compiler {

using namespace detail;
using logic::CountDirection;
using logic::FormulaPtr;
using PE = transformer::PEFeature::Kind;

std::string CompileMode::describe() const {
  std::string s = scaling == Scaling::TempScaling ? "temp" : "pe";
  return s + (masking == Masking::Any ? "/any" : "/future");
}

namespace {

struct CountParts {
  int p;   // count / i or count / (n - i + 1), exact
  int r1;  // approximately the count (1 when the count is 0)
  int z;   // 1 iff the count is 0
};

class FormulaCompiler {
 public:
  FormulaCompiler(CompileMode mode, const CompileOptions& options,
                  const logic::PredicateRegistry& registry, const logic::OperatorSet& ops)
      : b(options.alphabet, mode.masking == Masking::Any ? Mask::None : Mask::Future),
        mode_(mode),
        gamma_(options.gamma),
        registry_(registry),
        gadgets_(ops.prev || ops.next) {}

  Builder b;
  std::map<std::string, int> memo;
  std::vector<Probe> probes;

  int formula(const FormulaPtr& f) {
    auto key = logic::to_string(*f);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    int coord = std::visit(
        overloaded{
            [&](const logic::AtomQ& x) { return b.symbol(x.symbol); },
            [&](const logic::Not& x) {
              int a = formula(x.arg);
              return unit_op("not " + key, {{a, -1.0}}, 1.0, key);
            },
            [&](const logic::And& x) {
              int a = formula(x.lhs);
              int c = formula(x.rhs);
              return unit_op("and " + key, {{a, 1.0}, {c, 1.0}}, -1.0, key);
            },
            [&](const logic::Or& x) {
              int a = formula(x.lhs);
              int c = formula(x.rhs);
              int out = b.fresh(key);
              FfnOp op{"or " + key, {}};
              op.units.push_back({{{a, 1.0}}, 0.0, {{out, 1.0}}});
              op.units.push_back({{{c, 1.0}}, 0.0, {{out, 1.0}}});
              op.units.push_back({{{a, 1.0}, {c, 1.0}}, -1.0, {{out, -1.0}}});
              b.add_ffn(std::move(op));
              return out;
            },
            [&](const logic::Prev& x) { return shift(x.arg, key, true); },
            [&](const logic::Next& x) { return shift(x.arg, key, false); },
            [&](const logic::Since& x) { return since_until(x.lhs, x.rhs, key, true); },
            [&](const logic::Until& x) { return since_until(x.lhs, x.rhs, key, false); },
            [&](const logic::PredAtPos& x) {
              check_predicate(x.pred);
              return b.pe({PE::PredBit, x.pred});
            },
            [&](const logic::PredOfCount& x) { return pred_of_count(x, key); },
            [&](const logic::Compare& x) { return comparison(*x.lhs, *x.rhs, key); },
        },
        f->node);
    memo[key] = coord;
    return coord;
  }

  transformer::TemperatureFn temperature(const logic::OperatorSet& ops) const {
    if (mode_.scaling == Scaling::UnboundedPE) return transformer::TemperatureFn::constant(1.0);
    if (mode_.masking == Masking::Any) return transformer::TemperatureFn::inverse_length();
    if (ops.prev || ops.since) return transformer::TemperatureFn::inverse_position_squared();
    return transformer::TemperatureFn::inverse_position();
  }

 private:
  bool future_only() const { return mode_.masking == Masking::FutureOnly; }
  bool unbounded() const { return mode_.scaling == Scaling::UnboundedPE; }

  void check_predicate(const std::string& name) const {
    if (!registry_.contains(name)) throw PreconditionError("unknown predicate " + name);
  }

  int probe_layer(const Affine& form) const {
    int s = 0;
    for (const auto& t : form) s = std::max(s, b.stage(t.coord));
    return (s + 1) / 2;
  }

  void probe(const std::string& label, const Affine& form, double bias, Probe::Kind kind,
             double budget) {
    Probe p;
    p.label = label;
    for (const auto& t : form) p.form.emplace_back(t.coord, t.weight);
    p.bias = bias;
    p.kind = kind;
    p.budget = budget;
    p.layer = probe_layer(form);
    probes.push_back(std::move(p));
  }

  // out = ReLU(form + bias), exact on Boolean inputs.
  int unit_op(const std::string& label, Affine form, double bias, const std::string& name) {
    int out = b.fresh(name);
    FfnOp op{label, {}};
    op.units.push_back({std::move(form), bias, {{out, 1.0}}});
    b.add_ffn(std::move(op));
    return out;
  }

  // Rounds the approximate Boolean src to exact 0/1. Each (src, gate) pair
  // contributes round(src) while its gate is 0 and nothing while the gate
  // is >= 2 (src stays below 5/4 here).
  int gated_round(const std::vector<std::pair<int, Affine>>& parts, const std::string& label,
                  const std::string& name) {
    int out = b.fresh(name);
    FfnOp op{label, {}};
    for (const auto& [src, gate] : parts) {
      Affine in = {{src, 1.0}};
      for (const auto& t : gate) in.push_back({t.coord, -t.weight});
      op.units.push_back({in, -0.25, {{out, 2.0}}});
      op.units.push_back({in, -0.75, {{out, -2.0}}});
      probe("approx " + b.name(src), {{src, 1.0}}, 0.0, Probe::Kind::Boolean, 0.25);
    }
    b.add_ffn(std::move(op));
    return out;
  }

  int round(int src, const std::string& label, const std::string& name) {
    return gated_round({{src, {}}}, label, name);
  }

  // 2 ReLU(x - 1/2) - 2 ReLU(x - 1): 1 at x = 1, 0 for x <= 1/2.
  static void threshold_units(FfnOp& op, Affine x, int out) {
    op.units.push_back({x, -0.5, {{out, 2.0}}});
    op.units.push_back({std::move(x), -1.0, {{out, -2.0}}});
  }

  int uniform(const std::string& label, Mask mask, std::vector<std::pair<Term, int>> values) {
    AttnOp op;
    op.label = label;
    op.query = {{}};
    op.key = {{}};
    op.values = std::move(values);
    op.mask = mask;
    return b.add_attention(std::move(op));
  }

  int alt() { return b.pe({PE::AltSign, ""}); }

  int parity(bool odd) {
    auto key = std::string(odd ? "#odd" : "#even");
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int out = unit_op(key, {{alt(), odd ? -1.0 : 1.0}}, 0.0, key);
    memo[key] = out;
    return out;
  }

  int first() {
    if (auto it = memo.find("#first"); it != memo.end()) return it->second;
    int out = b.fresh("#first");
    FfnOp op{"mark first", {}};
    if (gadgets_) {
      int m = b.fresh("#first-avg");
      uniform("mark first (uniform over (-1)^(j+1))", Mask::Future, {{{alt(), -1.0}, m}});
      threshold_units(op, {{m, 1.0}}, out);
    } else {
      threshold_units(op, {{b.pe({PE::RecipPos, ""}), 1.0}}, out);
    }
    b.add_ffn(std::move(op));
    memo["#first"] = out;
    return out;
  }

  int last() {
    if (auto it = memo.find("#last"); it != memo.end()) return it->second;
    int out = b.fresh("#last");
    FfnOp op{"mark last", {}};
    if (gadgets_) {
      int m = b.fresh("#last-avg");
      uniform("mark last (uniform over (-1)^(j+1))", Mask::Past, {{{alt(), -1.0}, m}});
      threshold_units(op, {{m, 1.0}}, out);
      threshold_units(op, {{m, -1.0}}, out);
    } else {
      threshold_units(op, {{b.pe({PE::RecipRevPos, ""}), 1.0}}, out);
    }
    b.add_ffn(std::move(op));
    memo["#last"] = out;
    return out;
  }

  int recip() {
    if (!gadgets_) return b.pe({PE::RecipPos, ""});
    if (auto it = memo.find("#recip"); it != memo.end()) return it->second;
    int out = b.fresh("#recip");
    uniform("reciprocal position 1/i", Mask::Future, {{{first(), 1.0}, out}});
    memo["#recip"] = out;
    return out;
  }

  int recip_rev() {
    if (!gadgets_) return b.pe({PE::RecipRevPos, ""});
    if (auto it = memo.find("#recip-rev"); it != memo.end()) return it->second;
    int out = b.fresh("#recip-rev");
    uniform("reciprocal position 1/(n-i+1)", Mask::Past, {{{last(), 1.0}, out}});
    memo["#recip-rev"] = out;
    return out;
  }

  // Query coordinate that supplies the length- or position-dependent scale
  // of tie-broken scores (the temperature supplies it in TempScaling).
  int query_scale() {
    if (!unbounded()) return b.one();
    return future_only() ? b.pe({PE::PosSq, ""}) : b.pe({PE::Len, ""});
  }

  int tie_broken(const std::string& label, Affine key, Mask mask, int value, const std::string& name) {
    int out = b.fresh(name);
    AttnOp op;
    op.label = label;
    op.query = {{{query_scale(), 1.0}}};
    op.key = {std::move(key)};
    op.values = {{{value, 1.0}, out}};
    op.mask = mask;
    b.add_attention(std::move(op));
    return out;
  }

  int shift(const FormulaPtr& arg, const std::string& key, bool backward) {
    int a = formula(arg);
    const double g = gamma_;
    int A;
    int B;
    if (!backward) {
      // Leftmost even (A) / odd (B) position at or after i.
      int ijn = b.pe({PE::InvLenPos, ""});
      A = tie_broken("next-even " + key, {{alt(), g}, {ijn, -g}}, Mask::Past, a, key + "#even");
      B = tie_broken("next-odd " + key, {{alt(), -g}, {ijn, -g}}, Mask::Past, a, key + "#odd");
      int l = last();
      return gated_round({{A, {{parity(false), 2.0}, {l, 2.0}}}, {B, {{parity(true), 2.0}, {l, 2.0}}}},
                         "select+round " + key, key);
    }
    if (future_only()) {
      int r = recip();
      A = tie_broken("prev-even " + key, {{alt(), g / 2}, {r, -g}}, Mask::Future, a, key + "#even");
      B = tie_broken("prev-odd " + key, {{alt(), -g / 2}, {r, -g}}, Mask::Future, a, key + "#odd");
    } else {
      int ijn = b.pe({PE::InvLenPos, ""});
      A = tie_broken("prev-even " + key, {{alt(), g}, {ijn, g}}, Mask::Future, a, key + "#even");
      B = tie_broken("prev-odd " + key, {{alt(), -g}, {ijn, g}}, Mask::Future, a, key + "#odd");
    }
    int f = first();
    return gated_round({{A, {{parity(false), 2.0}, {f, 2.0}}}, {B, {{parity(true), 2.0}, {f, 2.0}}}},
                       "select+round " + key, key);
  }

  int since_until(const FormulaPtr& lhs, const FormulaPtr& rhs, const std::string& key, bool is_since) {
    int g = formula(logic::disj(logic::negate(lhs), rhs));
    int a = formula(logic::conj(lhs, rhs));
    const double gm = gamma_;
    int s;
    if (is_since && future_only()) {
      s = tie_broken("since " + key, {{g, gm}, {recip(), -gm}}, Mask::Future, a, key + "#raw");
    } else {
      int ijn = b.pe({PE::InvLenPos, ""});
      s = tie_broken((is_since ? "since " : "until ") + key,
                     {{g, 2 * gm}, {ijn, is_since ? gm : -gm}},
                     is_since ? Mask::Future : Mask::Past, a, key + "#raw");
    }
    return round(s, "round " + key, key);
  }

  int count_average(CountDirection dir, const FormulaPtr& f) {
    auto key = std::string(dir == CountDirection::Left ? "#L[" : "#R[") + logic::to_string(*f) + "]";
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int bit = formula(f);
    int out = b.fresh(key + "/len");
    uniform("count average " + key, dir == CountDirection::Left ? Mask::Future : Mask::Past,
            {{{bit, 1.0}, out}});
    memo[key] = out;
    return out;
  }

  // Table lookup of j = target with keys [2j, -j^2] and queries 3C [target/len, 1/len].
  int lookup(CountDirection dir, int p, bool plus_one, double C, Term value, const std::string& name,
             const std::string& label) {
    int r = dir == CountDirection::Left ? recip() : recip_rev();
    int pos = b.pe({unbounded() ? PE::PosLen : PE::Pos, ""});
    int pos_sq = b.pe({unbounded() ? PE::PosSqLen : PE::PosSq, ""});
    const double scale = 3.0 * C;
    Affine q0 = {{p, scale}};
    if (plus_one) q0.push_back({r, scale});
    int out = b.fresh(name);
    AttnOp op;
    op.label = label;
    op.query = {q0, {{r, scale}}};
    op.key = {{{pos, 2.0}}, {{pos_sq, -1.0}}};
    op.values = {{value, out}};
    op.mask = dir == CountDirection::Left ? Mask::Future : Mask::None;
    b.add_attention(std::move(op));
    return out;
  }

  CountParts count_parts(CountDirection dir, const FormulaPtr& f, std::int64_t C) {
    auto base = std::string(dir == CountDirection::Left ? "#L[" : "#R[") + logic::to_string(*f) + "]";
    auto key = base + "@" + std::to_string(C);
    if (auto it = parts_.find(key); it != parts_.end()) return it->second;
    int p = count_average(dir, f);
    const double budget = 1.0 / (4.0 * static_cast<double>(C));
    Term pos{b.pe({PE::Pos, ""}), 1.0};
    int r1 = lookup(dir, p, false, static_cast<double>(C), pos, key + "~",
                    "table lookup " + base + " scale 3*" + std::to_string(C));
    int r2 = lookup(dir, p, true, static_cast<double>(C), pos, key + "+1~",
                    "table lookup " + base + "+1 scale 3*" + std::to_string(C));
    probe("lookup " + key, {{r1, 1.0}}, 0.0, Probe::Kind::Integer, budget);
    probe("lookup+1 " + key, {{r2, 1.0}}, 0.0, Probe::Kind::Integer, budget);

    // near1(r) is 1 on [3/4, 5/4] and 0 outside (1/4, 7/4).
    int n1 = b.fresh(key + "~near1");
    int n2 = b.fresh(key + "+1~near1");
    FfnOp near{"near-one tests " + key, {}};
    for (auto [r, out] : {std::pair{r1, n1}, std::pair{r2, n2}}) {
      near.units.push_back({{{r, 1.0}}, -0.25, {{out, 2.0}}});
      near.units.push_back({{{r, 1.0}}, -0.75, {{out, -2.0}}});
      near.units.push_back({{{r, 1.0}}, -1.25, {{out, -2.0}}});
      near.units.push_back({{{r, 1.0}}, -1.75, {{out, 2.0}}});
    }
    b.add_ffn(std::move(near));
    // Both lookups land on 1 only for a zero count, or when a single
    // position is visible; there the exact average p is the count itself.
    int z = unit_op("zero count " + key, {{n1, 1.0}, {n2, 1.0}, {p, -1.0}}, -1.0, key + "==0");
    CountParts parts{p, r1, z};
    parts_[key] = parts;
    return parts;
  }

  static CountDirection direction_of(const logic::CountTerm& t, FormulaPtr& f) {
    if (auto* l = std::get_if<logic::CountLeft>(&t.node)) {
      f = l->arg;
      return CountDirection::Left;
    }
    f = std::get<logic::CountRight>(t.node).arg;
    return CountDirection::Right;
  }

  int pred_of_count(const logic::PredOfCount& x, const std::string& key) {
    check_predicate(x.pred);
    FormulaPtr f;
    CountDirection dir = direction_of(*x.count, f);
    CountParts parts = count_parts(dir, f, 1);
    int theta = b.pe({PE::PredBit, x.pred});
    int rt = lookup(dir, parts.p, false, 1.0, {theta, 1.0}, key + "~",
                    "table lookup " + x.pred + " at " + logic::to_string(*x.count));
    // theta_n(0) is false: a zero count closes the gate.
    return gated_round({{rt, {{parts.z, 2.0}}}}, "round " + key, key);
  }

  int comparison(const logic::CountTerm& lhs, const logic::CountTerm& rhs, const std::string& key) {
    auto nc = logic::normalize_comparison(lhs, rhs);
    if (nc.is_constant()) {
      if (nc.constant_value()) return b.one();
      return b.fresh(key);  // never written: constant 0
    }
    // sum_k c_k #_k >= c  <=>  sum_k c_k #_k - c + 1 >= 1; the lookups are
    // each within 1/(4C), so the sum is within 1/4.
    Affine x;
    for (const auto& term : nc.terms) {
      CountParts parts = count_parts(term.direction, term.formula, nc.total);
      double c = static_cast<double>(term.coefficient);
      x.push_back({parts.r1, c});
      x.push_back({parts.z, -c});
    }
    double bias = 1.0 - static_cast<double>(nc.constant);
    int out = b.fresh(key);
    FfnOp op{"compare+round " + key, {}};
    op.units.push_back({x, bias - 0.25, {{out, 2.0}}});
    op.units.push_back({x, bias - 0.75, {{out, -2.0}}});
    b.add_ffn(std::move(op));
    probe("sum " + key, x, bias, Probe::Kind::Boolean, 0.25);
    return out;
  }

  CompileMode mode_;
  double gamma_;
  const logic::PredicateRegistry& registry_;
  bool gadgets_;
  std::map<std::string, CountParts> parts_;
};

}  // namespace

CompiledFormula compile(const FormulaPtr& f, CompileMode mode, const logic::PredicateRegistry& registry,
                        const CompileOptions& options) {
  if (!f) throw PreconditionError("null formula");
  if (!(options.gamma > 0)) throw PreconditionError("gamma must be positive");
  auto info = logic::classify_fragment(*f);
  if (mode.masking == Masking::FutureOnly) {
    if (!info.future_masked_compilable) {
      throw ModeError("future-only masking needs a formula without X, U and #R: " +
                      logic::to_string(*f));
    }
    if (mode.scaling == Scaling::UnboundedPE && info.ops.count_left) {
      throw ModeError("counting under future-only masking needs temperature scaling");
    }
  }

  FormulaCompiler fc(mode, options, registry, info.ops);
  int root = fc.formula(f);
  auto tau = fc.temperature(info.ops);

  CompiledFormula cf;
  cf.formula = f;
  cf.mode = mode;
  cf.tau = tau;
  cf.spec = fc.b.build(root, transformer::WeightingFn::softmax_tau(tau), registry);
  for (const auto& pf : fc.b.positional()) cf.pe_features.push_back(pf.feature);
  for (const auto& [key, coord] : fc.memo) {
    if (key.starts_with("#")) continue;
    cf.coordinates[key] = coord;
    cf.ready_layer[key] = fc.b.layer_of(coord);
  }
  cf.probes = std::move(fc.probes);
  cf.trace = fc.b.trace();
  return cf;
}

}  // namespace softhard::compiler
