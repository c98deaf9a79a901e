#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "softhard/ahat/spec.hpp"

namespace softhard::ahat {

struct TieWitness {
  std::string input;
  int layer = 0;     // 1-based
  int position = 0;  // 1-based
  std::vector<int> tied;  // 1-based key positions sharing the maximum
  std::string reason;
};

struct TielessCheck {
  bool ok = true;
  std::optional<TieWitness> witness;
};

// Verifies every uniform layer has zero query/key maps and every tieless
// layer has a unique maximal score in every row on every probed input.
TielessCheck check_uniform_tieless(const AhatSpec& u, std::int64_t n, const InputSource& inputs);

struct GapEstimate {
  // Minimum over probed inputs, tieless layers and rows of the difference
  // between the largest and second largest distinct score. +inf when there
  // is no tieless layer or no row with two unmasked scores.
  double gamma;
  bool defined;
  // True when the input source covered every input of length n.
  bool exact;
};

GapEstimate estimate_gap(const AhatSpec& u, std::int64_t n, const InputSource& inputs);

enum class CalibrationMode { Analytic, Empirical };

const char* calibration_mode_name(CalibrationMode m);

struct Calibration {
  std::int64_t n = 1;
  double gamma = 0;
  bool gamma_defined = false;
  double x_max = 1;
  double p_max = 0;
  // Largest dimension among d, d_k and d_f.
  int dim = 1;
  // u_max[l]: bound on the largest activation entry after layer l (l = 0
  // is the initial activation, equal to x_max).
  std::vector<double> u_max;
  double k1 = 1;
  double k2 = 1;
  CalibrationMode mode = CalibrationMode::Analytic;
  std::string method;  // description of the probed inputs
  std::size_t probed = 0;
};

// Analytic mode bounds activations by (dim p_max)^(3l) dim x_max; empirical
// mode takes twice the measured maxima of the exact AHAT run.
Calibration calibrate(const AhatSpec& u, std::int64_t n, CalibrationMode mode,
                      const InputSource& inputs);
// Same over an explicit list of inputs of length n.
Calibration calibrate(const AhatSpec& u, std::int64_t n, CalibrationMode mode,
                      const std::vector<std::string>& words, const std::string& method);

struct TemperaturePlan {
  double gamma = 0;  // min(gamma(n), 1)
  std::vector<double> budgets;  // E_1, ..., E_L
  double tau = 1;
  std::vector<std::string> trace;
};

// E_L = gamma / (4 K2 x_max), E_l = E_{l+1} / (2 K1) and
// tau = gamma / (2 ln(K1 n x_max / E_1)) with gamma = min(gamma(n), 1), so an
// infinite gap counts as 1. Throws ContractBreach when a side condition fails
// and PreconditionError when the gap is not positive.
TemperaturePlan choose_temperature(const Calibration& cal, std::size_t layers, std::int64_t n);

}  // namespace softhard::ahat
