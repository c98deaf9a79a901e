#include "softhard/bounds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "softhard/common/error.hpp"
#include "softhard/common/parallel.hpp"
#include "softhard/common/rng.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::bounds {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Sample {
  double empirical;
  double bound;
};

using Generator = std::function<Sample(Rng&)>;

BoundReport run(const std::string& lemma, std::size_t trials, std::uint64_t seed, const Generator& gen) {
  std::vector<Sample> samples(trials);
  parallel_for(trials, [&](std::size_t t) {
    Rng rng(mix_seed(seed, t));
    samples[t] = gen(rng);
  });
  BoundReport r;
  r.lemma = lemma;
  r.trials = trials;
  r.seed = seed;
  r.max_ratio = -1;
  for (const auto& s : samples) {
    if (s.empirical > s.bound * (1 + kRoundoff)) ++r.violations;
    double ratio = s.bound > 0 ? s.empirical / s.bound : (s.empirical > 0 ? INFINITY : 0.0);
    if (ratio > r.max_ratio) {
      r.max_ratio = ratio;
      r.worst = s.empirical;
      r.bound_at_worst = s.bound;
    }
  }
  if (trials == 0) r.max_ratio = 0;
  r.margin = r.bound_at_worst - r.worst;
  return r;
}

std::vector<double> softmax(const std::vector<double>& s, double tau = 1.0) {
  return transformer::apply_weighting(
      transformer::WeightingFn::softmax_tau(transformer::TemperatureFn::constant(tau)), s, 1,
      static_cast<std::int64_t>(s.size()));
}

double l1_to_one_hot(const std::vector<double>& p, std::size_t target) {
  double d = 0;
  for (std::size_t j = 0; j < p.size(); ++j) d += std::abs((j == target ? 1.0 : 0.0) - p[j]);
  return d;
}

double l1(const Vec& v) { return v.cwiseAbs().sum(); }

Mat random_matrix(Rng& rng, int rows, int cols, double scale) {
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.uniform(-scale, scale);
  return m;
}

Vec random_vector(Rng& rng, int d, double scale) { return random_matrix(rng, d, 1, scale); }

// A perturbation with l1 norm at most eps (exactly eps with probability 1/2).
Vec perturbation(Rng& rng, int d, double eps) {
  Vec v = random_vector(rng, d, 1.0);
  double norm = l1(v);
  if (norm == 0) return v;
  double target = rng.coin() ? eps : eps * rng.uniform();
  return v * (target / norm);
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

Vec relu(const Vec& v) { return v.cwiseMax(0.0); }

Sample linear_map(Rng& rng) {
  int d = static_cast<int>(rng.integer(1, 8));
  Mat w = random_matrix(rng, d, d, rng.uniform(0.1, 5));
  Vec u = random_vector(rng, d, rng.uniform(0.1, 5));
  return {l1(w * u), d * max_abs(w) * l1(u)};
}

Sample ffn(Rng& rng) {
  int d = static_cast<int>(rng.integer(1, 8));
  double scale = rng.uniform(0.1, 3);
  Mat w1 = random_matrix(rng, d, d, scale), w2 = random_matrix(rng, d, d, scale);
  Vec b1 = random_vector(rng, d, scale), b2 = random_vector(rng, d, scale);
  double p = std::max(max_abs(w1), max_abs(w2));
  double eps = rng.uniform(0, 1);
  Vec u = random_vector(rng, d, 3);
  Vec uh = u + perturbation(rng, d, eps);
  Vec v = w2 * relu(w1 * u + b1) + b2;
  Vec vh = w2 * relu(w1 * uh + b1) + b2;
  return {l1(v - vh), d * d * p * p * eps};
}

Sample uniform_attention(Rng& rng) {
  int d = static_cast<int>(rng.integer(1, 8));
  int n = static_cast<int>(rng.integer(1, 32));
  int i = static_cast<int>(rng.integer(1, n));
  Mat wv = random_matrix(rng, d, d, rng.uniform(0.1, 3));
  double eps = rng.uniform(0, 1);
  Vec v = Vec::Zero(d), vh = Vec::Zero(d);
  for (int j = 1; j <= i; ++j) {
    Vec u = random_vector(rng, d, 3);
    Vec uh = u + perturbation(rng, d, eps);
    v += wv * u / i;
    vh += wv * uh / i;
  }
  return {l1(v - vh), d * max_abs(wv) * eps};
}

Sample attention_score(Rng& rng) {
  int d = static_cast<int>(rng.integer(1, 8));
  double scale = rng.uniform(0.1, 3);
  Mat wq = random_matrix(rng, d, d, scale), wk = random_matrix(rng, d, d, scale);
  double p = std::max(max_abs(wq), max_abs(wk));
  double eps = rng.uniform(0, 1);
  Vec ui = random_vector(rng, d, rng.uniform(0.1, 4)), uj = random_vector(rng, d, rng.uniform(0.1, 4));
  Vec uhi = ui + perturbation(rng, d, eps), uhj = uj + perturbation(rng, d, eps);
  double u_max = std::max({1.0, ui.cwiseAbs().maxCoeff(), uj.cwiseAbs().maxCoeff()});
  double root = std::sqrt(static_cast<double>(d));
  double s = (wq * ui).dot(wk * uj) / root;
  double sh = (wq * uhi).dot(wk * uhj) / root;
  return {std::abs(s - sh), std::pow(d, 1.5) * p * p * (2 * u_max * eps + eps * eps)};
}

std::vector<double> random_distribution(Rng& rng, int n) {
  std::vector<double> a(static_cast<std::size_t>(n));
  double total = 0;
  for (auto& x : a) total += x = rng.uniform() * (rng.coin(0.3) ? 0.0 : 1.0);
  if (total == 0) {
    a[static_cast<std::size_t>(rng.integer(0, n - 1))] = 1;
    return a;
  }
  for (auto& x : a) x /= total;
  return a;
}

Sample weighted_sum(Rng& rng) {
  int d = static_cast<int>(rng.integer(1, 8));
  int n = static_cast<int>(rng.integer(1, 32));
  Mat wv = random_matrix(rng, d, d, rng.uniform(0.1, 3));
  double eps = rng.uniform(0, 1);
  auto alpha = random_distribution(rng, n);
  auto alpha_h = random_distribution(rng, n);
  double eps1 = 0;
  for (int j = 0; j < n; ++j) eps1 += std::abs(alpha[j] - alpha_h[j]);
  Vec v = Vec::Zero(d), vh = Vec::Zero(d);
  double u_max = 0;
  for (int j = 0; j < n; ++j) {
    Vec u = random_vector(rng, d, 3);
    Vec uh = u + perturbation(rng, d, eps);
    u_max = std::max(u_max, u.cwiseAbs().maxCoeff());
    v += alpha[j] * (wv * u);
    vh += alpha_h[j] * (wv * uh);
  }
  return {l1(v - vh), d * max_abs(wv) * (d * u_max * eps1 + eps)};
}

const char* tie_break_name(compiler::TieBreak v) {
  switch (v) {
    case compiler::TieBreak::RightmostCausal: return "tie_break_causal";
    case compiler::TieBreak::Rightmost: return "tie_break_rightmost";
    case compiler::TieBreak::Leftmost: return "tie_break_leftmost";
  }
  return "tie_break";
}

}  // namespace

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json doc = {
      {"lemma", r.lemma},
      {"trials", r.trials},
      {"seed", r.seed},
      {"worst", r.worst},
      {"bound_at_worst", r.bound_at_worst},
      {"margin", r.margin},
      {"max_ratio", r.max_ratio},
      {"violations", r.violations},
      {"tight", r.tight()},
  };
  if (!r.parts.empty()) {
    doc["parts"] = nlohmann::json::array();
    for (const auto& p : r.parts) doc["parts"].push_back(to_json(p));
  }
  return doc;
}

double softmax_distance_to_hardmax(const std::vector<double>& scores) {
  if (scores.empty()) throw PreconditionError("empty score vector");
  auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
  return l1_to_one_hot(softmax(scores), best);
}

double softmax_tau_distance(const std::vector<double>& scores, std::size_t target, double tau) {
  return l1_to_one_hot(softmax(scores, tau), target);
}

BoundReport check_softmax_bound(std::size_t trials, std::uint64_t seed) {
  return run("softmax_bound", trials, seed, [](Rng& rng) {
    int n = static_cast<int>(rng.integer(1, 64));
    int star = static_cast<int>(rng.integer(0, n - 1));
    double gamma = rng.uniform(0.05, 8);
    double top = rng.uniform(-10, 10);
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      double slack = rng.coin(0.5) ? 0.0 : rng.uniform(0, 2 * gamma);
      s[j] = top - std::abs(j - star) * gamma - (j == star ? 0.0 : slack);
    }
    return Sample{softmax_distance_to_hardmax(s), 4 * std::exp(-gamma)};
  });
}

BoundReport check_table_lookup(std::size_t trials, std::uint64_t seed) {
  return run("table_lookup", trials, seed, [](Rng& rng) {
    auto i = rng.integer(1, 64);
    auto c = rng.integer(1, i);
    double lambda = rng.uniform(1, 10);
    double got = compiler::table_lookup_value(c, i, lambda);
    return Sample{std::abs(static_cast<double>(c) - got), 1.5 * std::exp(-lambda)};
  });
}

BoundReport check_tie_break(compiler::TieBreak variant, std::size_t trials, std::uint64_t seed) {
  return run(tie_break_name(variant), trials, seed, [variant](Rng& rng) {
    auto n = rng.integer(1, 64);
    double gamma = rng.uniform(1, 6);
    double p_one = rng.uniform();
    std::vector<double> s(static_cast<std::size_t>(n));
    for (auto& x : s) x = rng.coin(p_one) ? 1.0 : 0.0;
    auto hat = compiler::gadget_tie_break(variant, s, gamma, n);
    double best = *std::max_element(s.begin(), s.end());
    std::size_t pick = 0;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (s[j] == best) {
        pick = j;
        if (variant == compiler::TieBreak::Leftmost) break;
      }
    }
    return Sample{l1_to_one_hot(softmax(hat), pick), 4 * std::exp(-gamma)};
  });
}

BoundReport check_softmax_tau_bound(std::size_t trials, std::uint64_t seed) {
  return run("softmax_tau_bound", trials, seed, [](Rng& rng) {
    int n = static_cast<int>(rng.integer(1, 128));
    double top = rng.uniform(-10, 10);
    double gamma = rng.uniform(0.01, 4);
    double eps = rng.coin(0.2) ? 0.0 : rng.uniform(0, 0.999) * gamma / 2;
    double tau = gamma * rng.uniform(0.02, 1.0);
    int target = static_cast<int>(rng.integer(0, n - 1));
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      if (j == target) {
        s[j] = top - eps * (rng.coin() ? 1.0 : rng.uniform());
      } else {
        s[j] = top - gamma + eps - (rng.coin() ? 0.0 : rng.uniform(0, 2 * gamma));
      }
    }
    return Sample{softmax_tau_distance(s, static_cast<std::size_t>(target), tau),
                  2.0 * n * std::exp(-(gamma - 2 * eps) / tau)};
  });
}

BoundReport check_error_propagation(std::size_t trials, std::uint64_t seed) {
  BoundReport r;
  r.lemma = "error_propagation";
  r.trials = trials;
  r.seed = seed;
  const std::vector<std::pair<const char*, Generator>> parts = {
      {"linear_map", linear_map},
      {"ffn", ffn},
      {"uniform_attention", uniform_attention},
      {"attention_score", attention_score},
      {"weighted_sum", weighted_sum},
  };
  for (std::size_t k = 0; k < parts.size(); ++k) {
    auto p = run(parts[k].first, trials, mix_seed(seed, 1000 + k), parts[k].second);
    r.violations += p.violations;
    if (k == 0 || p.max_ratio > r.max_ratio) {
      r.max_ratio = p.max_ratio;
      r.worst = p.worst;
      r.bound_at_worst = p.bound_at_worst;
      r.margin = p.margin;
    }
    r.parts.push_back(std::move(p));
  }
  return r;
}

std::vector<BoundReport> check_all(std::size_t trials, std::uint64_t seed) {
  return {
      check_softmax_bound(trials, seed),
      check_table_lookup(trials, seed),
      check_tie_break(compiler::TieBreak::RightmostCausal, trials, seed),
      check_tie_break(compiler::TieBreak::Rightmost, trials, seed),
      check_tie_break(compiler::TieBreak::Leftmost, trials, seed),
      check_softmax_tau_bound(trials, seed),
      check_error_propagation(trials, seed),
  };
}

}  // namespace softhard::bounds
