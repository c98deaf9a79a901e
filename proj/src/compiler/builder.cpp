#include "builder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "softhard/common/error.hpp"

namespace softhard::compiler::detail {

using transformer::Matrix;
using transformer::Vector;

Builder::Builder(std::string alphabet, Mask idle_mask)
    : alphabet_(std::move(alphabet)), idle_mask_(idle_mask) {
  names_.push_back("one");
  stage_.push_back(0);
}

int Builder::fresh(const std::string& name) {
  names_.push_back(name);
  stage_.push_back(0);
  return dims() - 1;
}

int Builder::symbol(char c) {
  if (alphabet_.find(c) == std::string::npos) {
    throw PreconditionError(std::string("symbol '") + c + "' not in alphabet");
  }
  auto it = symbols_.find(c);
  if (it != symbols_.end()) return it->second;
  int coord = fresh(std::string("Q") + c);
  symbols_[c] = coord;
  return coord;
}

int Builder::pe(const PEFeature& f) {
  for (const auto& pf : positional_) {
    if (pf.feature == f) return pf.coord;
  }
  int coord = fresh("pe:" + f.name() + (f.pred.empty() ? "" : "[" + f.pred + "]"));
  positional_.push_back({coord, f});
  return coord;
}

int Builder::num_layers() const {
  int l = 0;
  if (!attention_.empty()) l = std::max(l, attention_.rbegin()->first);
  if (!ffn_.empty()) l = std::max(l, ffn_.rbegin()->first);
  return l;
}

int Builder::input_stage(const Affine& a) const {
  int s = 0;
  for (const auto& t : a) s = std::max(s, stage_.at(t.coord));
  return s;
}

int Builder::add_attention(AttnOp op) {
  if (op.query.size() != op.key.size() || op.query.empty()) {
    throw DimensionError("attention op needs matching nonempty query/key");
  }
  int s = 0;
  for (const auto& q : op.query) s = std::max(s, input_stage(q));
  for (const auto& k : op.key) s = std::max(s, input_stage(k));
  for (const auto& [src, dst] : op.values) s = std::max(s, stage_.at(src.coord));
  int layer = (s + 1) / 2 + 1;
  while (attention_.count(layer)) ++layer;
  for (const auto& [src, dst] : op.values) stage_.at(dst) = 2 * layer - 1;
  attention_.emplace(layer, std::move(op));
  return layer;
}

int Builder::add_ffn(FfnOp op) {
  int s = 0;
  for (const auto& u : op.units) s = std::max(s, input_stage(u.in));
  int layer = s / 2 + 1;
  for (const auto& u : op.units) {
    for (const auto& t : u.out) stage_.at(t.coord) = 2 * layer;
  }
  ffn_[layer].push_back(std::move(op));
  return layer;
}

transformer::TransformerSpec Builder::build(int readout, const transformer::WeightingFn& weighting,
                                            const logic::PredicateRegistry& registry) const {
  transformer::TransformerSpec spec;
  const int d = dims();
  spec.alphabet = alphabet_;
  spec.d = d;
  spec.readout = readout;
  spec.residual = true;
  spec.predicates = registry;
  for (char c : alphabet_) {
    Vector we = Vector::Zero(d);
    we[one()] = 1.0;
    auto it = symbols_.find(c);
    if (it != symbols_.end()) we[it->second] = 1.0;
    spec.word_embedding[c] = we;
  }
  spec.positional = positional_;

  const int layers = num_layers();
  for (int l = 1; l <= layers; ++l) {
    transformer::Layer layer;
    auto& att = layer.attention;
    att.weighting = weighting;
    auto ait = attention_.find(l);
    if (ait == attention_.end()) {
      att.wq = Matrix::Zero(1, d);
      att.wk = Matrix::Zero(1, d);
      att.wv = Matrix::Zero(d, d);
      att.mask = idle_mask_;
    } else {
      const AttnOp& op = ait->second;
      const int dk = static_cast<int>(op.query.size());
      // Scores are divided by sqrt(d_k) downstream; fold it into the query.
      const double root = std::sqrt(static_cast<double>(dk));
      att.wq = Matrix::Zero(dk, d);
      att.wk = Matrix::Zero(dk, d);
      att.wv = Matrix::Zero(d, d);
      for (int r = 0; r < dk; ++r) {
        for (const auto& t : op.query[r]) att.wq(r, t.coord) += t.weight * root;
        for (const auto& t : op.key[r]) att.wk(r, t.coord) += t.weight;
      }
      for (const auto& [src, dst] : op.values) att.wv(dst, src.coord) += src.weight;
      att.mask = op.mask;
    }

    std::vector<const Unit*> units;
    auto fit = ffn_.find(l);
    if (fit != ffn_.end()) {
      for (const auto& op : fit->second) {
        for (const auto& u : op.units) units.push_back(&u);
      }
    }
    const int df = std::max<int>(1, static_cast<int>(units.size()));
    auto& f = layer.ffn;
    f.w1 = Matrix::Zero(df, d);
    f.b1 = Vector::Zero(df);
    f.w2 = Matrix::Zero(d, df);
    f.b2 = Vector::Zero(d);
    for (int u = 0; u < static_cast<int>(units.size()); ++u) {
      for (const auto& t : units[u]->in) f.w1(u, t.coord) += t.weight;
      f.b1[u] = units[u]->bias;
      for (const auto& t : units[u]->out) f.w2(t.coord, u) += t.weight;
    }
    spec.layers.push_back(std::move(layer));
  }
  spec.validate();
  return spec;
}

std::vector<std::string> Builder::trace() const {
  std::vector<std::string> out;
  const int layers = num_layers();
  for (int l = 1; l <= layers; ++l) {
    std::ostringstream line;
    line << "layer " << l << ": attention ";
    auto ait = attention_.find(l);
    line << (ait == attention_.end() ? std::string("idle") : ait->second.label);
    line << "; ffn ";
    auto fit = ffn_.find(l);
    if (fit == ffn_.end()) {
      line << "idle";
    } else {
      for (std::size_t i = 0; i < fit->second.size(); ++i) {
        line << (i ? ", " : "") << fit->second[i].label;
      }
    }
    out.push_back(line.str());
  }
  return out;
}

}  // namespace softhard::compiler::detail
