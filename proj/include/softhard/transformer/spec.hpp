#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "softhard/logic/predicates.hpp"

namespace softhard::transformer {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// n x d activations, one row per position.
using ActivationSequence = Matrix;

// Temperature as a named parametric form.
//   Constant:      tau = scale
//   LengthPower:   tau = scale * n^(-exponent)
//   PositionPower: tau = scale * i^(-exponent)   (i is the query position)
struct TemperatureFn {
  enum class Kind { Constant, LengthPower, PositionPower };

  Kind kind = Kind::Constant;
  double scale = 1.0;
  double exponent = 0.0;

  double operator()(std::int64_t i, std::int64_t n) const;
  std::string describe() const;

  static TemperatureFn constant(double tau) { return {Kind::Constant, tau, 0.0}; }
  static TemperatureFn inverse_length() { return {Kind::LengthPower, 1.0, 1.0}; }
  static TemperatureFn inverse_position() { return {Kind::PositionPower, 1.0, 1.0}; }
  static TemperatureFn inverse_position_squared() { return {Kind::PositionPower, 1.0, 2.0}; }

  bool operator==(const TemperatureFn&) const = default;
};

struct WeightingFn {
  enum class Kind { Softmax, SoftmaxTau, LHard, RHard, AHard };

  Kind kind = Kind::Softmax;
  TemperatureFn tau;  // only read for SoftmaxTau

  static WeightingFn softmax() { return {Kind::Softmax, {}}; }
  static WeightingFn softmax_tau(TemperatureFn t) { return {Kind::SoftmaxTau, t}; }
  static WeightingFn lhard() { return {Kind::LHard, {}}; }
  static WeightingFn rhard() { return {Kind::RHard, {}}; }
  static WeightingFn ahard() { return {Kind::AHard, {}}; }

  bool operator==(const WeightingFn&) const = default;
};

struct PEFeature {
  enum class Kind {
    InvLenPos,    // i/n
    AltSign,      // (-1)^i
    RecipPos,     // 1/i
    RecipRevPos,  // 1/(n-i+1)
    Pos,          // i
    PosSq,        // i^2
    Len,          // n
    PosLen,       // i*n
    PosSqLen,     // i^2*n
    PredBit,      // theta_n(i) in {0,1}
  };

  Kind kind = Kind::Pos;
  std::string pred;  // PredBit only

  double value(std::int64_t i, std::int64_t n, const logic::PredicateRegistry& registry) const;
  std::string name() const;
  static PEFeature from_name(const std::string& name, const std::string& pred = {});

  bool operator==(const PEFeature&) const = default;
};

enum class Mask { None, Future, Past };

// Future masking keeps j <= i; past masking keeps j >= i.
inline bool visible(Mask m, std::int64_t i, std::int64_t j) {
  switch (m) {
    case Mask::None: return true;
    case Mask::Future: return j <= i;
    case Mask::Past: return j >= i;
  }
  return true;
}

struct AttentionSpec {
  Matrix wq;  // d_k x d
  Matrix wk;  // d_k x d
  Matrix wv;  // d x d
  Mask mask = Mask::None;
  WeightingFn weighting;
  bool scale_scores = true;  // divide scores by sqrt(d_k)
};

struct FFNSpec {
  Matrix w1;  // d_f x d
  Vector b1;  // d_f
  Matrix w2;  // d x d_f
  Vector b2;  // d
};

struct Layer {
  AttentionSpec attention;
  FFNSpec ffn;
};

struct PositionalFeature {
  int coord;
  PEFeature feature;
};

struct TransformerSpec {
  std::string alphabet;
  int d = 0;
  std::map<char, Vector> word_embedding;
  std::vector<PositionalFeature> positional;
  std::vector<Layer> layers;
  int readout = 0;
  // When set, each sublayer adds its input to its output:
  //   c = h + SA(h),  h' = c + FFN(c).
  bool residual = false;
  logic::PredicateRegistry predicates;

  // Throws DimensionError / PreconditionError on inconsistent shapes,
  // overlapping PE coordinates, or unknown predicates.
  void validate() const;
};

}  // namespace softhard::transformer
