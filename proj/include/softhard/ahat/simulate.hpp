#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softhard/ahat/calibrate.hpp"
#include "softhard/transformer/spec.hpp"

namespace softhard::ahat {

// Same parameters as u; every attention layer uses softmax with constant
// temperature plan.tau.
transformer::TransformerSpec to_smat(const AhatSpec& u, const TemperaturePlan& plan);

struct LayerError {
  int layer = 0;          // 1-based
  double error = 0;       // max over probed inputs and positions of the l1 gap
  double budget = 0;      // E_l
  std::size_t worst_input = 0;
  bool ok = true;
};

struct SimulationReport {
  std::int64_t n = 1;
  std::string method;
  std::size_t inputs = 0;
  double tau = 0;
  std::vector<LayerError> layers;
  double final_error = 0;
  bool final_ok = true;
  bool pass = true;
};

// Runs u and s on every probed input and compares activations after each
// layer in the l1 norm. Passes when the final error is at most 1/4 and every
// layer stays within its budget.
SimulationReport verify_simulation(const AhatSpec& u, const transformer::TransformerSpec& s,
                                   const TemperaturePlan& plan, std::int64_t n,
                                   const InputSource& inputs);
SimulationReport verify_simulation(const AhatSpec& u, const transformer::TransformerSpec& s,
                                   const TemperaturePlan& plan, std::int64_t n,
                                   const std::vector<std::string>& words, const std::string& method);

// Fits 1/tau(n) = C n log n by the geometric mean of the ratios and reports
// the spread max(ratio) / min(ratio).
struct GrowthFit {
  double c = 0;
  double spread = 0;
  std::vector<double> ratios;
};

GrowthFit fit_n_log_n(const std::vector<std::int64_t>& ns, const std::vector<double>& taus);

}  // namespace softhard::ahat
