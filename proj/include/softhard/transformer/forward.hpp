#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Sparse>

#include "softhard/transformer/spec.hpp"

namespace softhard::transformer {

// Maps a score row (masked entries are -inf) to attention weights. i and n
// are the 1-based query position and the length; they feed the temperature.
std::vector<double> apply_weighting(const WeightingFn& wf, std::span<const double> scores,
                                    std::int64_t i, std::int64_t n);

// Exact self-attention: returns c with c_i = sum_j alpha_ij Wv h_j (no residual).
ActivationSequence attention_layer(const AttentionSpec& spec, const ActivationSequence& h);

// A validated spec with sparse copies of the weights for repeated runs.
class Model {
 public:
  explicit Model(TransformerSpec spec);

  const TransformerSpec& spec() const { return spec_; }
  std::size_t num_layers() const { return layers_.size(); }

  ActivationSequence embed(std::string_view w) const;
  // n x n score matrix of layer l with -inf at masked entries.
  Matrix scores(std::size_t l, const ActivationSequence& h) const;
  Matrix weights(std::size_t l, const ActivationSequence& h) const;
  // Attention sublayer including the residual term when enabled.
  ActivationSequence attend(std::size_t l, const ActivationSequence& h) const;
  ActivationSequence feed_forward(std::size_t l, const ActivationSequence& c) const;
  ActivationSequence layer(std::size_t l, const ActivationSequence& h) const;

  ActivationSequence forward(std::string_view w) const;
  // h^(0), ..., h^(L).
  std::vector<ActivationSequence> trace(std::string_view w) const;
  bool accepts(std::string_view w) const;

 private:
  using Sparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;
  struct Prepared {
    Sparse wq_t, wk_t, wv_t, w1_t, w2_t;
    Eigen::RowVectorXd b1, b2;
    double score_scale;
    bool uniform;
  };

  TransformerSpec spec_;
  std::vector<Prepared> layers_;
};

ActivationSequence forward(const TransformerSpec& spec, std::string_view w);

// Reads the readout coordinate at the last position: >= 3/4 accepts,
// <= 1/4 rejects, anything between throws ContractBreach.
bool accepts(const TransformerSpec& spec, std::string_view w);
bool readout_verdict(double value);

}  // namespace softhard::transformer
