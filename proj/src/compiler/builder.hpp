#pragma once

#include <map>
#include <string>
#include <vector>

#include "softhard/transformer/spec.hpp"

namespace softhard::compiler::detail {

using transformer::Mask;
using transformer::PEFeature;

struct Term {
  int coord;
  double weight;
};
using Affine = std::vector<Term>;

// One hidden ReLU unit: out += weight * ReLU(in . x + bias).
struct Unit {
  Affine in;
  double bias = 0.0;
  std::vector<Term> out;
};

struct AttnOp {
  std::string label;
  std::vector<Affine> query;  // one entry per key dimension
  std::vector<Affine> key;
  std::vector<std::pair<Term, int>> values;  // weight * h[src] -> dst
  Mask mask = Mask::None;
};

struct FfnOp {
  std::string label;
  std::vector<Unit> units;
};

// Collects attention and FFN operations over named coordinates and packs
// them into residual layers as early as their inputs allow. Each layer has
// a single attention head, so at most one attention op per layer.
//
// Stages: the embedding is stage 0; the attention of layer l writes at
// stage 2l-1 and its FFN at stage 2l.
class Builder {
 public:
  Builder(std::string alphabet, Mask idle_mask);

  int fresh(const std::string& name);
  int one() const { return 0; }
  int symbol(char c);
  int pe(const PEFeature& f);

  int stage(int coord) const { return stage_.at(coord); }
  int layer_of(int coord) const { return (stage_.at(coord) + 1) / 2; }
  const std::string& name(int coord) const { return names_.at(coord); }
  int dims() const { return static_cast<int>(names_.size()); }
  int num_layers() const;

  // Both return the 1-based layer the op was placed in.
  int add_attention(AttnOp op);
  int add_ffn(FfnOp op);

  const std::vector<transformer::PositionalFeature>& positional() const { return positional_; }

  transformer::TransformerSpec build(int readout, const transformer::WeightingFn& weighting,
                                     const logic::PredicateRegistry& registry) const;
  std::vector<std::string> trace() const;

 private:
  int input_stage(const Affine& a) const;

  std::string alphabet_;
  Mask idle_mask_;
  std::vector<std::string> names_;
  std::vector<int> stage_;
  std::map<char, int> symbols_;
  std::vector<transformer::PositionalFeature> positional_;
  std::map<int, AttnOp> attention_;
  std::map<int, std::vector<FfnOp>> ffn_;
};

}  // namespace softhard::compiler::detail
