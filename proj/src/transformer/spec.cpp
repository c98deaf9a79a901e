#include "softhard/transformer/spec.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "softhard/common/error.hpp"

namespace softhard::transformer {

double TemperatureFn::operator()(std::int64_t i, std::int64_t n) const {
  switch (kind) {
    case Kind::Constant: return scale;
    case Kind::LengthPower: return scale * std::pow(static_cast<double>(n), -exponent);
    case Kind::PositionPower: return scale * std::pow(static_cast<double>(i), -exponent);
  }
  return scale;
}

std::string TemperatureFn::describe() const {
  std::ostringstream out;
  out.precision(17);
  auto power = [&](const char* var) {
    if (scale != 1.0) out << scale << "*";
    if (exponent == 1.0) {
      out << "1/" << var;
    } else {
      out << var << "^" << -exponent;
    }
  };
  switch (kind) {
    case Kind::Constant: out << scale; break;
    case Kind::LengthPower: power("n"); break;
    case Kind::PositionPower: power("i"); break;
  }
  return out.str();
}

double PEFeature::value(std::int64_t i, std::int64_t n,
                        const logic::PredicateRegistry& registry) const {
  const double di = static_cast<double>(i);
  const double dn = static_cast<double>(n);
  switch (kind) {
    case Kind::InvLenPos: return di / dn;
    case Kind::AltSign: return i % 2 == 0 ? 1.0 : -1.0;
    case Kind::RecipPos: return 1.0 / di;
    case Kind::RecipRevPos: return 1.0 / (dn - di + 1.0);
    case Kind::Pos: return di;
    case Kind::PosSq: return di * di;
    case Kind::Len: return dn;
    case Kind::PosLen: return di * dn;
    case Kind::PosSqLen: return di * di * dn;
    case Kind::PredBit: return registry.evaluate(pred, n, i) ? 1.0 : 0.0;
  }
  return 0.0;
}

namespace {

const std::pair<PEFeature::Kind, const char*> kFeatureNames[] = {
    {PEFeature::Kind::InvLenPos, "i/n"},       {PEFeature::Kind::AltSign, "(-1)^i"},
    {PEFeature::Kind::RecipPos, "1/i"},        {PEFeature::Kind::RecipRevPos, "1/(n-i+1)"},
    {PEFeature::Kind::Pos, "i"},               {PEFeature::Kind::PosSq, "i^2"},
    {PEFeature::Kind::Len, "n"},               {PEFeature::Kind::PosLen, "i*n"},
    {PEFeature::Kind::PosSqLen, "i^2*n"},      {PEFeature::Kind::PredBit, "pred"},
};

}  // namespace

std::string PEFeature::name() const {
  for (const auto& [k, s] : kFeatureNames) {
    if (k == kind) return s;
  }
  return "?";
}

PEFeature PEFeature::from_name(const std::string& name, const std::string& pred) {
  for (const auto& [k, s] : kFeatureNames) {
    if (name == s) return {k, k == Kind::PredBit ? pred : std::string()};
  }
  throw PreconditionError("unknown positional feature " + name);
}

void TransformerSpec::validate() const {
  if (d <= 0) throw DimensionError("d must be positive");
  if (readout < 0 || readout >= d) throw DimensionError("readout coordinate out of range");
  for (char c : alphabet) {
    auto it = word_embedding.find(c);
    if (it == word_embedding.end()) {
      throw PreconditionError(std::string("no word embedding for symbol '") + c + "'");
    }
    if (it->second.size() != d) throw DimensionError("word embedding has wrong size");
  }
  std::set<int> used;
  for (const auto& pf : positional) {
    if (pf.coord < 0 || pf.coord >= d) throw DimensionError("PE coordinate out of range");
    if (!used.insert(pf.coord).second) {
      throw PreconditionError("PE coordinate " + std::to_string(pf.coord) + " used twice");
    }
    if (pf.feature.kind == PEFeature::Kind::PredBit && !predicates.contains(pf.feature.pred)) {
      throw PreconditionError("unknown predicate " + pf.feature.pred + " in PE");
    }
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& a = layers[l].attention;
    const auto& f = layers[l].ffn;
    auto where = " in layer " + std::to_string(l + 1);
    if (a.wq.cols() != d || a.wk.cols() != d || a.wq.rows() != a.wk.rows() || a.wq.rows() == 0) {
      throw DimensionError("query/key shape" + where);
    }
    if (a.wv.rows() != d || a.wv.cols() != d) throw DimensionError("value shape" + where);
    if (f.w1.cols() != d || f.b1.size() != f.w1.rows() || f.w2.rows() != d ||
        f.w2.cols() != f.w1.rows() || f.b2.size() != d) {
      throw DimensionError("FFN shape" + where);
    }
    if (a.weighting.kind == WeightingFn::Kind::SoftmaxTau && a.weighting.tau.scale <= 0) {
      throw PreconditionError("temperature must be positive" + where);
    }
  }
}

}  // namespace softhard::transformer
