#include "softhard/compiler/gadgets.hpp"

#include <algorithm>
#include <cmath>

#include "builder.hpp"
#include "softhard/common/error.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::compiler {

using transformer::Matrix;
using transformer::Vector;

transformer::FFNSpec gadget_rounding_ffn() {
  transformer::FFNSpec f;
  f.w1 = Matrix::Constant(2, 1, 1.0);
  f.b1 = Vector(2);
  f.b1 << -0.25, -0.75;
  f.w2 = Matrix(1, 2);
  f.w2 << 2.0, -2.0;
  f.b2 = Vector::Zero(1);
  return f;
}

double round_approx(double x) {
  return 2.0 * std::max(x - 0.25, 0.0) - 2.0 * std::max(x - 0.75, 0.0);
}

std::vector<double> gadget_tie_break(TieBreak variant, std::span<const double> scores, double gamma,
                                     std::int64_t n) {
  if (!(gamma > 0)) throw PreconditionError("gamma must be positive");
  if (n < static_cast<std::int64_t>(scores.size())) throw PreconditionError("n below score count");
  const double dn = static_cast<double>(n);
  std::vector<double> out(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    const double j = static_cast<double>(k + 1);
    switch (variant) {
      case TieBreak::RightmostCausal: out[k] = gamma * dn * dn * (scores[k] - 1.0 / j); break;
      case TieBreak::Rightmost: out[k] = 2.0 * gamma * dn * (scores[k] + j / (2.0 * dn)); break;
      case TieBreak::Leftmost: out[k] = 2.0 * gamma * dn * (scores[k] - j / (2.0 * dn)); break;
    }
  }
  return out;
}

std::vector<double> table_lookup_scores(std::int64_t c, std::int64_t i, double lambda) {
  if (c < 1 || c > i) throw PreconditionError("table lookup needs 1 <= c <= i");
  std::vector<double> s(static_cast<std::size_t>(i));
  for (std::int64_t j = 1; j <= i; ++j) {
    s[j - 1] = lambda * static_cast<double>(2 * c * j - j * j);
  }
  return s;
}

double table_lookup_value(std::int64_t c, std::int64_t i, double lambda) {
  auto s = table_lookup_scores(c, i, lambda);
  auto alpha = transformer::apply_weighting(transformer::WeightingFn::softmax(), s, i, i);
  double v = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) v += alpha[j] * static_cast<double>(j + 1);
  return v;
}

namespace {

using detail::AttnOp;
using detail::Builder;
using detail::FfnOp;
using transformer::Mask;
using PE = transformer::PEFeature::Kind;

int marker(Builder& b, Marker which) {
  int alt = b.pe({PE::AltSign, ""});
  int m = b.fresh("avg");
  AttnOp op;
  op.label = which == Marker::First ? "mark first" : "mark last";
  op.query = {{}};
  op.key = {{}};
  op.values = {{{alt, -1.0}, m}};
  op.mask = which == Marker::First ? Mask::Future : Mask::Past;
  b.add_attention(std::move(op));
  int out = b.fresh(which == Marker::First ? "first" : "last");
  FfnOp f{"threshold", {}};
  f.units.push_back({{{m, 1.0}}, -0.5, {{out, 2.0}}});
  f.units.push_back({{{m, 1.0}}, -1.0, {{out, -2.0}}});
  if (which == Marker::Last) {
    f.units.push_back({{{m, -1.0}}, -0.5, {{out, 2.0}}});
    f.units.push_back({{{m, -1.0}}, -1.0, {{out, -2.0}}});
  }
  b.add_ffn(std::move(f));
  return out;
}

}  // namespace

transformer::TransformerSpec gadget_mark_first_last(Marker which, const std::string& alphabet) {
  Builder b(alphabet, Mask::None);
  int out = marker(b, which);
  return b.build(out, transformer::WeightingFn::softmax(), {});
}

transformer::TransformerSpec gadget_reciprocal_position(Direction direction,
                                                        const std::string& alphabet) {
  Builder b(alphabet, Mask::None);
  bool fwd = direction == Direction::Forward;
  int m = marker(b, fwd ? Marker::First : Marker::Last);
  int out = b.fresh(fwd ? "1/i" : "1/(n-i+1)");
  AttnOp op;
  op.label = "reciprocal";
  op.query = {{}};
  op.key = {{}};
  op.values = {{{m, 1.0}, out}};
  op.mask = fwd ? Mask::Future : Mask::Past;
  b.add_attention(std::move(op));
  return b.build(out, transformer::WeightingFn::softmax(), {});
}

}  // namespace softhard::compiler
