#include "softhard/transformer/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "softhard/common/error.hpp"

namespace softhard::transformer {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// exp(x) is below the smallest subnormal for x < -745.
constexpr double kExpFloor = -745.0;

void weigh(const WeightingFn& wf, const double* s, double* out, std::size_t len, std::int64_t i,
           std::int64_t n) {
  double best = kNegInf;
  for (std::size_t j = 0; j < len; ++j) best = std::max(best, s[j]);
  if (best == kNegInf) throw PreconditionError("attention row with every score masked");
  std::fill(out, out + len, 0.0);

  switch (wf.kind) {
    case WeightingFn::Kind::LHard:
    case WeightingFn::Kind::RHard: {
      std::size_t pick = len;
      for (std::size_t j = 0; j < len; ++j) {
        if (s[j] == best) {
          pick = j;
          if (wf.kind == WeightingFn::Kind::LHard) break;
        }
      }
      out[pick] = 1.0;
      return;
    }
    case WeightingFn::Kind::AHard: {
      std::size_t ties = 0;
      for (std::size_t j = 0; j < len; ++j) ties += s[j] == best;
      for (std::size_t j = 0; j < len; ++j) {
        if (s[j] == best) out[j] = 1.0 / static_cast<double>(ties);
      }
      return;
    }
    case WeightingFn::Kind::Softmax:
    case WeightingFn::Kind::SoftmaxTau: {
      double tau = wf.kind == WeightingFn::Kind::SoftmaxTau ? wf.tau(i, n) : 1.0;
      if (!(tau > 0)) throw PreconditionError("non-positive temperature");
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        if (s[j] == kNegInf) continue;
        double x = (s[j] - best) / tau;
        out[j] = x < kExpFloor ? 0.0 : std::exp(x);
        total += out[j];
      }
      for (std::size_t j = 0; j < len; ++j) out[j] /= total;
      return;
    }
  }
}

bool is_zero(const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; }

Eigen::SparseMatrix<double, Eigen::RowMajor> sparse_transpose(const Matrix& m) {
  Matrix t = m.transpose();
  return t.sparseView(0.0, 0.0);
}

}  // namespace

std::vector<double> apply_weighting(const WeightingFn& wf, std::span<const double> scores,
                                    std::int64_t i, std::int64_t n) {
  std::vector<double> out(scores.size());
  if (scores.empty()) throw PreconditionError("empty score vector");
  weigh(wf, scores.data(), out.data(), scores.size(), i, n);
  return out;
}

ActivationSequence attention_layer(const AttentionSpec& spec, const ActivationSequence& h) {
  const Eigen::Index d = h.cols();
  if (spec.wq.cols() != d || spec.wk.cols() != d || spec.wv.cols() != d || spec.wv.rows() != d ||
      spec.wq.rows() != spec.wk.rows()) {
    throw DimensionError("attention weights do not match activation width");
  }
  const std::int64_t n = h.rows();
  Matrix q = h * spec.wq.transpose();
  Matrix k = h * spec.wk.transpose();
  Matrix v = h * spec.wv.transpose();
  double scale = spec.scale_scores ? 1.0 / std::sqrt(static_cast<double>(spec.wq.rows())) : 1.0;
  Matrix s = (q * k.transpose()) * scale;
  Matrix alpha(n, n);
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      if (!visible(spec.mask, i, j)) s(i, j) = kNegInf;
    }
    weigh(spec.weighting, s.row(i).data(), alpha.row(i).data(), static_cast<std::size_t>(n), i + 1,
          n);
  }
  return alpha * v;
}

Model::Model(TransformerSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  for (const auto& layer : spec_.layers) {
    const auto& a = layer.attention;
    Prepared p;
    p.wq_t = sparse_transpose(a.wq);
    p.wk_t = sparse_transpose(a.wk);
    p.wv_t = sparse_transpose(a.wv);
    p.w1_t = sparse_transpose(layer.ffn.w1);
    p.w2_t = sparse_transpose(layer.ffn.w2);
    p.b1 = layer.ffn.b1.transpose();
    p.b2 = layer.ffn.b2.transpose();
    p.score_scale = a.scale_scores ? 1.0 / std::sqrt(static_cast<double>(a.wq.rows())) : 1.0;
    p.uniform = is_zero(a.wq) || is_zero(a.wk);
    layers_.push_back(std::move(p));
  }
}

ActivationSequence Model::embed(std::string_view w) const {
  if (w.empty()) throw PreconditionError("input must be nonempty");
  const std::int64_t n = static_cast<std::int64_t>(w.size());
  ActivationSequence x(n, spec_.d);
  for (std::int64_t i = 0; i < n; ++i) {
    auto it = spec_.word_embedding.find(w[i]);
    if (it == spec_.word_embedding.end() || spec_.alphabet.find(w[i]) == std::string::npos) {
      throw PreconditionError(std::string("symbol '") + w[i] + "' not in alphabet");
    }
    x.row(i) = it->second.transpose();
    for (const auto& pf : spec_.positional) {
      x(i, pf.coord) += pf.feature.value(i + 1, n, spec_.predicates);
    }
  }
  return x;
}

Matrix Model::scores(std::size_t l, const ActivationSequence& h) const {
  const auto& p = layers_.at(l);
  const auto mask = spec_.layers[l].attention.mask;
  const Eigen::Index n = h.rows();
  Matrix s;
  if (p.uniform) {
    s = Matrix::Zero(n, n);
  } else {
    Matrix q = h * p.wq_t;
    Matrix k = h * p.wk_t;
    s = (q * k.transpose()) * p.score_scale;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!visible(mask, i, j)) s(i, j) = kNegInf;
    }
  }
  return s;
}

Matrix Model::weights(std::size_t l, const ActivationSequence& h) const {
  Matrix s = scores(l, h);
  const Eigen::Index n = h.rows();
  Matrix alpha(n, n);
  const auto& wf = spec_.layers[l].attention.weighting;
  for (Eigen::Index i = 0; i < n; ++i) {
    weigh(wf, s.row(i).data(), alpha.row(i).data(), static_cast<std::size_t>(n), i + 1, n);
  }
  return alpha;
}

ActivationSequence Model::attend(std::size_t l, const ActivationSequence& h) const {
  if (h.cols() != spec_.d) throw DimensionError("activation width does not match d");
  Matrix v = h * layers_.at(l).wv_t;
  ActivationSequence c = weights(l, h) * v;
  if (spec_.residual) c += h;
  return c;
}

ActivationSequence Model::feed_forward(std::size_t l, const ActivationSequence& c) const {
  const auto& p = layers_.at(l);
  Matrix z = c * p.w1_t;
  z.rowwise() += p.b1;
  z = z.cwiseMax(0.0);
  ActivationSequence out = z * p.w2_t;
  out.rowwise() += p.b2;
  if (spec_.residual) out += c;
  return out;
}

ActivationSequence Model::layer(std::size_t l, const ActivationSequence& h) const {
  return feed_forward(l, attend(l, h));
}

ActivationSequence Model::forward(std::string_view w) const {
  ActivationSequence h = embed(w);
  for (std::size_t l = 0; l < layers_.size(); ++l) h = layer(l, h);
  return h;
}

std::vector<ActivationSequence> Model::trace(std::string_view w) const {
  std::vector<ActivationSequence> out;
  out.push_back(embed(w));
  for (std::size_t l = 0; l < layers_.size(); ++l) out.push_back(layer(l, out.back()));
  return out;
}

bool Model::accepts(std::string_view w) const {
  ActivationSequence h = forward(w);
  return readout_verdict(h(h.rows() - 1, spec_.readout));
}

ActivationSequence forward(const TransformerSpec& spec, std::string_view w) {
  return Model(spec).forward(w);
}

bool accepts(const TransformerSpec& spec, std::string_view w) { return Model(spec).accepts(w); }

bool readout_verdict(double value) {
  if (value >= 0.75) return true;
  if (value <= 0.25) return false;
  throw ContractBreach("readout value " + std::to_string(value) +
                       " is not an approximate Boolean");
}

}  // namespace softhard::transformer
