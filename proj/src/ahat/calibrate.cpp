#include "softhard/ahat/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "softhard/common/error.hpp"
#include "softhard/common/parallel.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::ahat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_zero(const transformer::Matrix& m) { return m.size() == 0 || m.cwiseAbs().maxCoeff() == 0.0; }

double max_abs(const transformer::Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Largest minus second largest distinct finite score; +inf if only one.
double row_gap(const transformer::Matrix& s, Eigen::Index i) {
  double best = -kInf, second = -kInf;
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    double x = s(i, j);
    if (x == -kInf) continue;
    if (x > best) {
      second = best;
      best = x;
    } else if (x < best && x > second) {
      second = x;
    }
  }
  return second == -kInf ? kInf : best - second;
}

struct RunStats {
  std::optional<TieWitness> witness;
  double gap = kInf;
  std::vector<double> entry_max;  // per activation level 0..L
};

RunStats probe(const transformer::Model& model, const AhatSpec& u, const std::string& w,
               bool want_gap) {
  RunStats r;
  auto trace = model.trace(w);
  for (const auto& h : trace) r.entry_max.push_back(max_abs(h));
  for (std::size_t l = 0; l < u.kinds.size(); ++l) {
    if (u.kinds[l] != LayerKind::Tieless) continue;
    auto s = model.scores(l, trace[l]);
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      double best = s.row(i).maxCoeff();
      std::vector<int> tied;
      for (Eigen::Index j = 0; j < s.cols(); ++j)
        if (s(i, j) == best) tied.push_back(static_cast<int>(j) + 1);
      if (tied.size() > 1 && !r.witness) {
        r.witness = TieWitness{w, static_cast<int>(l) + 1, static_cast<int>(i) + 1, tied,
                               "tied maximal scores"};
      }
      if (want_gap) r.gap = std::min(r.gap, row_gap(s, i));
    }
  }
  return r;
}

std::vector<RunStats> probe_all(const AhatSpec& u, const std::vector<std::string>& words,
                                bool want_gap) {
  transformer::Model model(u.spec);
  std::vector<RunStats> out(words.size());
  parallel_for(words.size(), [&](std::size_t k) { out[k] = probe(model, u, words[k], want_gap); });
  return out;
}

bool has_tieless(const AhatSpec& u) {
  return std::find(u.kinds.begin(), u.kinds.end(), LayerKind::Tieless) != u.kinds.end();
}

}  // namespace

TielessCheck check_uniform_tieless(const AhatSpec& u, std::int64_t n, const InputSource& inputs) {
  u.validate();
  TielessCheck result;
  for (std::size_t l = 0; l < u.kinds.size(); ++l) {
    const auto& a = u.spec.layers[l].attention;
    if (u.kinds[l] == LayerKind::Uniform && !(is_zero(a.wq) && is_zero(a.wk))) {
      result.ok = false;
      result.witness = TieWitness{"", static_cast<int>(l) + 1, 0, {}, "uniform layer with nonzero query/key map"};
      return result;
    }
  }
  auto words = inputs.inputs(u.spec.alphabet, n);
  auto stats = probe_all(u, words, false);
  for (auto& s : stats) {
    if (s.witness) {
      result.ok = false;
      result.witness = s.witness;
      break;
    }
  }
  return result;
}

GapEstimate estimate_gap(const AhatSpec& u, std::int64_t n, const InputSource& inputs) {
  u.validate();
  GapEstimate g{kInf, false, inputs.kind == InputSource::Kind::Exhaustive};
  if (!has_tieless(u)) return g;
  auto stats = probe_all(u, inputs.inputs(u.spec.alphabet, n), true);
  for (const auto& s : stats) g.gamma = std::min(g.gamma, s.gap);
  g.defined = std::isfinite(g.gamma);
  return g;
}

const char* calibration_mode_name(CalibrationMode m) {
  return m == CalibrationMode::Analytic ? "analytic" : "empirical";
}

Calibration calibrate(const AhatSpec& u, std::int64_t n, CalibrationMode mode,
                      const InputSource& inputs) {
  return calibrate(u, n, mode, inputs.inputs(u.spec.alphabet, n), inputs.describe());
}

Calibration calibrate(const AhatSpec& u, std::int64_t n, CalibrationMode mode,
                      const std::vector<std::string>& words, const std::string& method) {
  u.validate();
  const auto& spec = u.spec;
  const std::size_t layers = spec.layers.size();
  for (const auto& w : words)
    if (static_cast<std::int64_t>(w.size()) != n) throw PreconditionError("input length differs from n");
  Calibration cal;
  cal.n = n;
  cal.mode = mode;
  cal.method = method;
  cal.probed = words.size();
  auto stats = probe_all(u, words, has_tieless(u));
  std::vector<double> measured(layers + 1, 0.0);
  double gap = kInf;
  for (const auto& s : stats) {
    for (std::size_t l = 0; l <= layers; ++l) measured[l] = std::max(measured[l], s.entry_max[l]);
    gap = std::min(gap, s.gap);
  }
  cal.gamma = gap;
  cal.gamma_defined = std::isfinite(gap);
  cal.x_max = std::max(1.0, measured[0]);

  double p = 0;
  int dim = spec.d;
  for (const auto& [sym, v] : spec.word_embedding) p = std::max(p, v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  for (const auto& layer : spec.layers) {
    const auto& a = layer.attention;
    const auto& f = layer.ffn;
    p = std::max({p, max_abs(a.wq), max_abs(a.wk), max_abs(a.wv), max_abs(f.w1), max_abs(f.w2),
                  max_abs(f.b1), max_abs(f.b2)});
    dim = std::max({dim, static_cast<int>(a.wq.rows()), static_cast<int>(f.w1.rows())});
  }
  cal.p_max = p;
  cal.dim = dim;

  const double dp = dim * p;
  cal.u_max.assign(layers + 1, cal.x_max);
  for (std::size_t l = 1; l <= layers; ++l) {
    if (mode == CalibrationMode::Analytic) {
      cal.u_max[l] = std::max(1.0, std::pow(dp, 3.0 * static_cast<double>(l)) * dim * cal.x_max);
    } else {
      cal.u_max[l] = 2.0 * std::max(1.0, measured[l]);
    }
  }

  cal.k1 = 1;
  cal.k2 = 1;
  const double d3p3 = std::pow(dp, 3.0);
  for (std::size_t l = 0; l < layers; ++l) {
    const double u_in = cal.u_max[l];
    if (u.kinds[l] == LayerKind::Tieless) {
      const double dk = static_cast<double>(spec.layers[l].attention.wq.rows());
      const double scale = spec.layers[l].attention.scale_scores ? std::sqrt(dk) : 1.0;
      cal.k2 = std::max(cal.k2, 3.0 * dim * dim * p * p / scale * std::max(1.0, u_in / cal.x_max));
      cal.k1 = std::max(cal.k1, d3p3 * std::max(1.0, 2.0 * dim * u_in));
    } else {
      cal.k1 = std::max(cal.k1, d3p3);
    }
  }
  return cal;
}

TemperaturePlan choose_temperature(const Calibration& cal, std::size_t layers, std::int64_t n) {
  if (!(cal.gamma > 0)) throw PreconditionError("temperature plan needs a positive gap");
  TemperaturePlan plan;
  plan.gamma = std::min(cal.gamma, 1.0);
  const double g = plan.gamma;
  std::ostringstream t;
  t.precision(6);
  t << "gamma = min(" << cal.gamma << ", 1) = " << g << ", x_max = " << cal.x_max << ", K1 = " << cal.k1
    << ", K2 = " << cal.k2;
  plan.trace.push_back(t.str());
  if (layers == 0) {
    plan.tau = 1;
    plan.trace.push_back("no layers; tau = 1");
    return plan;
  }
  plan.budgets.assign(layers, 0.0);
  plan.budgets[layers - 1] = g / (4 * cal.k2 * cal.x_max);
  for (std::size_t l = layers - 1; l-- > 0;) plan.budgets[l] = plan.budgets[l + 1] / (2 * cal.k1);
  for (std::size_t l = 0; l < layers; ++l) {
    const double score_err = cal.k2 * cal.x_max * plan.budgets[l];
    if (l + 1 < layers && score_err > g / 4)
      throw ContractBreach("score error budget exceeds gamma/4 at layer " + std::to_string(l + 1));
    if (!(score_err < g / 2))
      throw ContractBreach("score error budget not below gamma/2 at layer " + std::to_string(l + 1));
    std::ostringstream e;
    e.precision(6);
    e << "E_" << l + 1 << " = " << plan.budgets[l];
    plan.trace.push_back(e.str());
  }
  if (plan.budgets.back() > 0.25) throw ContractBreach("final error budget exceeds 1/4");
  const double arg = cal.k1 * static_cast<double>(n) * cal.x_max / plan.budgets.front();
  plan.tau = g / (2 * std::log(arg));
  std::ostringstream s;
  s.precision(6);
  s << "tau = gamma / (2 ln(K1 n x_max / E_1)) = " << plan.tau;
  plan.trace.push_back(s.str());
  return plan;
}

}  // namespace softhard::ahat
