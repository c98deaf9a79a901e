#include "softhard/ahat/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "softhard/common/error.hpp"
#include "softhard/common/parallel.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::ahat {

transformer::TransformerSpec to_smat(const AhatSpec& u, const TemperaturePlan& plan) {
  u.validate();
  if (!(plan.tau > 0)) throw PreconditionError("temperature must be positive");
  auto s = u.spec;
  for (auto& layer : s.layers)
    layer.attention.weighting =
        transformer::WeightingFn::softmax_tau(transformer::TemperatureFn::constant(plan.tau));
  return s;
}

SimulationReport verify_simulation(const AhatSpec& u, const transformer::TransformerSpec& s,
                                   const TemperaturePlan& plan, std::int64_t n,
                                   const InputSource& inputs) {
  return verify_simulation(u, s, plan, n, inputs.inputs(u.spec.alphabet, n), inputs.describe());
}

SimulationReport verify_simulation(const AhatSpec& u, const transformer::TransformerSpec& s,
                                   const TemperaturePlan& plan, std::int64_t n,
                                   const std::vector<std::string>& words, const std::string& method) {
  u.validate();
  const std::size_t layers = u.spec.layers.size();
  if (s.layers.size() != layers) throw DimensionError("simulating spec has a different depth");
  if (!plan.budgets.empty() && plan.budgets.size() != layers)
    throw DimensionError("plan budgets do not match the layer count");

  for (const auto& w : words)
    if (static_cast<std::int64_t>(w.size()) != n) throw PreconditionError("input length differs from n");
  transformer::Model hard(u.spec), soft(s);
  std::vector<std::vector<double>> errs(words.size(), std::vector<double>(layers, 0.0));
  parallel_for(words.size(), [&](std::size_t k) {
    auto a = hard.trace(words[k]);
    auto b = soft.trace(words[k]);
    for (std::size_t l = 0; l < layers; ++l)
      errs[k][l] = (a[l + 1] - b[l + 1]).cwiseAbs().rowwise().sum().maxCoeff();
  });

  SimulationReport r;
  r.n = n;
  r.method = method;
  r.inputs = words.size();
  r.tau = plan.tau;
  for (std::size_t l = 0; l < layers; ++l) {
    LayerError e;
    e.layer = static_cast<int>(l) + 1;
    e.budget = plan.budgets.empty() ? 0.25 : plan.budgets[l];
    for (std::size_t k = 0; k < words.size(); ++k) {
      if (errs[k][l] > e.error) {
        e.error = errs[k][l];
        e.worst_input = k;
      }
    }
    e.ok = e.error <= e.budget;
    r.layers.push_back(e);
  }
  r.final_error = layers == 0 ? 0.0 : r.layers.back().error;
  r.final_ok = r.final_error <= 0.25;
  r.pass = r.final_ok && std::all_of(r.layers.begin(), r.layers.end(), [](const auto& e) { return e.ok; });
  return r;
}

GrowthFit fit_n_log_n(const std::vector<std::int64_t>& ns, const std::vector<double>& taus) {
  if (ns.size() != taus.size() || ns.empty()) throw PreconditionError("mismatched fit inputs");
  GrowthFit fit;
  double log_sum = 0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    if (ns[k] < 2) throw PreconditionError("n log n fit needs n >= 2");
    double n = static_cast<double>(ns[k]);
    double ratio = (1.0 / taus[k]) / (n * std::log(n));
    fit.ratios.push_back(ratio);
    log_sum += std::log(ratio);
  }
  fit.c = std::exp(log_sum / static_cast<double>(ns.size()));
  auto [lo, hi] = std::minmax_element(fit.ratios.begin(), fit.ratios.end());
  fit.spread = *hi / *lo;
  return fit;
}

}  // namespace softhard::ahat
