#include "softhard/cli/experiments.hpp"

#include <algorithm>
#include <map>

#include "softhard/common/error.hpp"
#include "softhard/common/parallel.hpp"
#include "softhard/common/rng.hpp"
#include "softhard/compiler/audit.hpp"
#include "softhard/logic/eval.hpp"
#include "softhard/logic/parser.hpp"
#include "softhard/srasp/dyck.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::cli {

using compiler::CompileMode;
using compiler::Masking;
using compiler::Scaling;
using logic::Fragment;
using nlohmann::json;

json envelope(const std::string& command, const json& config, const json& results, bool pass) {
  return json{{"tool", kToolName}, {"version", kVersion}, {"command", command},
              {"config", config},  {"pass", pass},        {"results", results}};
}

CompileMode parse_mode(const std::string& text) {
  for (auto s : {Scaling::TempScaling, Scaling::UnboundedPE})
    for (auto m : {Masking::Any, Masking::FutureOnly}) {
      CompileMode mode{s, m};
      if (mode.describe() == text) return mode;
    }
  throw PreconditionError("unknown mode '" + text + "' (expected temp/any, temp/future, pe/any or pe/future)");
}

std::vector<Suite> standard_suites() {
  const CompileMode temp_any{Scaling::TempScaling, Masking::Any};
  const CompileMode pe_any{Scaling::UnboundedPE, Masking::Any};
  const CompileMode temp_future{Scaling::TempScaling, Masking::FutureOnly};
  return {
      {"prev_next", "formulas/prev_next.txt", Fragment::PrevNext, {temp_any, pe_any}},
      {"prev_future", "formulas/prev_future.txt", Fragment::Prev, {temp_future}},
      {"since_until", "formulas/since_until.txt", Fragment::SinceUntil, {temp_any, pe_any}},
      {"since_future", "formulas/since_future.txt", Fragment::Since, {temp_future}},
      {"counting", "formulas/counting.txt", Fragment::Count, {temp_any, pe_any}},
      {"counting_future", "formulas/counting_future.txt", Fragment::CountLeft, {temp_future}},
      {"ltl", "formulas/ltl.txt", Fragment::Ltl, {temp_any, pe_any}},
      {"ltl_future", "formulas/ltl_future.txt", Fragment::PrevSince, {temp_future}},
      {"ltl_counting", "formulas/ltl_counting.txt", Fragment::LtlCount, {temp_any, pe_any}},
      {"ltl_counting_future", "formulas/ltl_counting_future.txt", Fragment::PrevSinceCountLeft,
       {temp_future}},
  };
}

json to_json(const SweepConfig& c) {
  return json{{"exhaustive_max_len", c.exhaustive_max_len},
              {"random_count", c.random_count},
              {"random_max_len", c.random_max_len},
              {"seed", c.seed},
              {"alphabet", c.alphabet}};
}

namespace {

std::vector<std::string> all_strings(const std::string& alphabet, int max_len) {
  std::vector<std::string> out, layer = {""};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    next.reserve(layer.size() * alphabet.size());
    for (const auto& w : layer)
      for (char c : alphabet) next.push_back(w + c);
    layer = std::move(next);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::string random_string(Rng& rng, const std::string& alphabet, std::int64_t len) {
  std::string w;
  for (std::int64_t i = 0; i < len; ++i)
    w += alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(alphabet.size()) - 1))];
  return w;
}

}  // namespace

std::vector<std::string> sweep_strings(const SweepConfig& c, std::uint64_t stream) {
  auto out = all_strings(c.alphabet, c.exhaustive_max_len);
  Rng rng(mix_seed(c.seed, stream));
  for (std::size_t t = 0; t < c.random_count; ++t)
    out.push_back(random_string(rng, c.alphabet, rng.integer(1, c.random_max_len)));
  return out;
}

std::uint64_t stream_of(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json to_json(const FormulaResult& r) {
  json j{{"formula", r.formula},   {"mode", r.mode},           {"fragment", r.fragment},
         {"depth", r.depth},       {"d", r.d},                 {"layers", r.layers},
         {"tau", r.tau},           {"strings", r.strings},     {"positions", r.positions},
         {"mismatches", r.mismatches}, {"audit_breaches", r.breaches},
         {"worst_deviation", r.worst_deviation}, {"ok", r.ok()}};
  if (!r.first_mismatch.empty()) j["first_mismatch"] = r.first_mismatch;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

FormulaResult verify_compiled(const compiler::CompiledFormula& cf, const SweepConfig& config,
                              const logic::PredicateRegistry& registry) {
  FormulaResult r;
  r.formula = logic::to_string(*cf.formula);
  r.mode = cf.mode.describe();
  r.fragment = logic::fragment_name(logic::classify_fragment(*cf.formula).fragment);
  r.depth = logic::nesting_depth(*cf.formula);
  r.d = cf.spec.d;
  r.layers = static_cast<int>(cf.spec.layers.size());
  r.tau = cf.tau.describe();

  const auto words = sweep_strings(config, stream_of(r.formula));
  struct Outcome {
    std::size_t mismatches = 0;
    std::int64_t first = -1;
    bool breach = false;
    double worst = 0;
  };
  std::vector<Outcome> out(words.size());
  transformer::Model model(cf.spec);
  parallel_for(words.size(), [&](std::size_t k) {
    const auto& w = words[k];
    auto h = model.forward(w);
    auto truth = logic::eval_formula(*cf.formula, w, registry);
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (h(static_cast<Eigen::Index>(i), cf.spec.readout) != (truth[i] ? 1.0 : 0.0)) {
        if (out[k].first < 0) out[k].first = static_cast<std::int64_t>(i) + 1;
        ++out[k].mismatches;
      }
    }
    auto audit = compiler::audit_activations(cf, h);
    out[k].breach = !audit.ok;
    out[k].worst = audit.worst;
  });

  r.strings = words.size();
  for (std::size_t k = 0; k < words.size(); ++k) {
    r.positions += words[k].size();
    r.mismatches += out[k].mismatches;
    if (out[k].mismatches > 0 && r.first_mismatch.empty())
      r.first_mismatch = words[k] + "@" + std::to_string(out[k].first);
    r.breaches += out[k].breach ? 1 : 0;
    r.worst_deviation = std::max(r.worst_deviation, out[k].worst);
  }
  return r;
}

FormulaResult verify_formula(const logic::FormulaPtr& f, CompileMode mode, const SweepConfig& config,
                             const logic::PredicateRegistry& registry) {
  try {
    compiler::CompileOptions options;
    options.alphabet = config.alphabet;
    return verify_compiled(compiler::compile(f, mode, registry, options), config, registry);
  } catch (const Error& e) {
    FormulaResult r;
    r.formula = logic::to_string(*f);
    r.mode = mode.describe();
    r.fragment = logic::fragment_name(logic::classify_fragment(*f).fragment);
    r.depth = logic::nesting_depth(*f);
    r.error = e.what();
    return r;
  }
}

bool SuiteResult::ok() const {
  return well_formed && !formulas.empty() &&
         std::all_of(formulas.begin(), formulas.end(), [](const auto& f) { return f.ok(); });
}

json to_json(const SuiteResult& r) {
  json formulas = json::array();
  for (const auto& f : r.formulas) formulas.push_back(to_json(f));
  return json{{"suite", r.suite}, {"mode", r.mode}, {"well_formed", r.well_formed},
              {"ok", r.ok()},     {"formulas", formulas}};
}

std::vector<SuiteResult> verify_suite(const Suite& suite, const std::string& data_dir,
                                      const SweepConfig& config, const logic::PredicateRegistry& registry) {
  auto formulas = logic::parse_formula_file(data_dir + "/" + suite.file, config.alphabet, registry);
  bool well_formed = formulas.size() >= 5;
  for (const auto& f : formulas) {
    auto info = logic::classify_fragment(*f);
    if (!logic::fragment_contains(suite.fragment, info.ops) || logic::nesting_depth(*f) > 3) well_formed = false;
  }
  std::vector<SuiteResult> out;
  for (const auto& mode : suite.modes) {
    SuiteResult r;
    r.suite = suite.name;
    r.mode = mode.describe();
    r.well_formed = well_formed;
    for (const auto& f : formulas) r.formulas.push_back(verify_formula(f, mode, config, registry));
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const ParityResult& r) {
  json j{{"formula", r.formula}, {"mode", r.mode}, {"strings", r.strings}, {"mismatches", r.mismatches}};
  if (!r.first_mismatch.empty()) j["first_mismatch"] = r.first_mismatch;
  return j;
}

ParityResult verify_parity(const logic::FormulaPtr& f, CompileMode mode, const SweepConfig& config,
                           const logic::PredicateRegistry& registry) {
  ParityResult r;
  r.formula = logic::to_string(*f);
  r.mode = mode.describe();
  compiler::CompileOptions options;
  options.alphabet = config.alphabet;
  auto cf = compiler::compile(f, mode, registry, options);
  transformer::Model model(cf.spec);
  const auto words = sweep_strings(config, stream_of(r.formula));
  std::vector<char> bad(words.size(), 0);
  parallel_for(words.size(), [&](std::size_t k) {
    bool odd = std::count(words[k].begin(), words[k].end(), '1') % 2 == 1;
    bad[k] = model.accepts(words[k]) != odd;
  });
  r.strings = words.size();
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (!bad[k]) continue;
    if (r.first_mismatch.empty()) r.first_mismatch = words[k];
    ++r.mismatches;
  }
  return r;
}

json to_json(const AhatConfig& c) {
  return json{{"exhaustive_max_len", c.exhaustive_max_len},
              {"sampled_count", c.sampled_count},
              {"sampled_max_len", c.sampled_max_len},
              {"calibration_samples", c.calibration_samples},
              {"seed", c.seed},
              {"calibration", ahat::calibration_mode_name(c.mode)}};
}

namespace {

struct AhatPoint {
  json report;
  double tau = 0;
  bool pass = false;
};

// Calibrates on calibration_words, then verifies on check_words.
AhatPoint ahat_point(const ahat::AhatSpec& u, std::int64_t n, const AhatConfig& config,
                     const std::vector<std::string>& calibration_words, const std::string& calibration_method,
                     const std::vector<std::string>& check_words, const std::string& check_method) {
  AhatPoint p;
  p.report = json{{"n", n}, {"inputs", check_words.size()}, {"method", check_method}};
  try {
    auto cal = ahat::calibrate(u, n, config.mode, calibration_words, calibration_method);
    auto plan = ahat::choose_temperature(cal, u.spec.layers.size(), n);
    auto s = ahat::to_smat(u, plan);
    auto rep = ahat::verify_simulation(u, s, plan, n, check_words, check_method);
    json layers = json::array();
    for (const auto& e : rep.layers)
      layers.push_back(json{{"layer", e.layer},
                            {"error", e.error},
                            {"budget", e.budget},
                            {"worst_input", check_words[e.worst_input]},
                            {"ok", e.ok}});
    p.report["calibration"] = json{{"method", cal.method}, {"probed", cal.probed}, {"gamma", cal.gamma},
                                   {"gamma_defined", cal.gamma_defined}, {"x_max", cal.x_max},
                                   {"p_max", cal.p_max}, {"k1", cal.k1}, {"k2", cal.k2}};
    p.report["tau"] = plan.tau;
    p.report["layers"] = layers;
    p.report["final_error"] = rep.final_error;
    p.report["pass"] = rep.pass;
    p.tau = plan.tau;
    p.pass = rep.pass;
  } catch (const Error& e) {
    p.report["error"] = e.what();
    p.report["pass"] = false;
  }
  return p;
}

std::vector<std::string> merged(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace

AhatRun run_ahat(const ahat::AhatSpec& u, const AhatConfig& config) {
  u.validate();
  const auto& alphabet = u.spec.alphabet;
  AhatRun run;
  json exhaustive = json::array(), sampled = json::array();
  double worst_final = 0;

  for (std::int64_t n = 1; n <= config.exhaustive_max_len; ++n) {
    auto words = ahat::InputSource::exhaustive().inputs(alphabet, n);
    auto p = ahat_point(u, n, config, words, "exhaustive", words, "exhaustive");
    run.pass = run.pass && p.pass;
    if (p.report.contains("final_error")) worst_final = std::max(worst_final, p.report["final_error"].get<double>());
    exhaustive.push_back(std::move(p.report));
  }

  std::map<std::int64_t, std::vector<std::string>> groups;
  Rng rng(mix_seed(config.seed, stream_of("ahat-sampled")));
  for (std::size_t t = 0; t < config.sampled_count; ++t) {
    auto len = rng.integer(1, config.sampled_max_len);
    groups[len].push_back(random_string(rng, alphabet, len));
  }
  for (const auto& [n, words] : groups) {
    auto extra = ahat::InputSource::automatic(alphabet.size(), n, config.calibration_samples, config.seed);
    auto p = ahat_point(u, n, config, merged(words, extra.inputs(alphabet, n)),
                        "sampled group + " + extra.describe(), words, "sampled");
    run.pass = run.pass && p.pass;
    if (p.report.contains("final_error")) worst_final = std::max(worst_final, p.report["final_error"].get<double>());
    sampled.push_back(std::move(p.report));
  }

  run.report = json{{"fixture", u.name},
                    {"layers", u.spec.layers.size()},
                    {"worst_final_error", worst_final},
                    {"pass", run.pass},
                    {"exhaustive", exhaustive},
                    {"sampled", sampled}};
  return run;
}

GrowthRun run_growth(const ahat::AhatSpec& u, const std::vector<std::int64_t>& ns, const AhatConfig& config) {
  u.validate();
  const auto& alphabet = u.spec.alphabet;
  GrowthRun run;
  std::vector<double> taus;
  json points = json::array();
  for (auto n : ns) {
    auto source = ahat::InputSource::automatic(alphabet.size(), n, config.calibration_samples, config.seed);
    auto words = source.inputs(alphabet, n);
    auto p = ahat_point(u, n, config, words, source.describe(), words, source.describe());
    run.pass = run.pass && p.pass;
    taus.push_back(p.tau);
    points.push_back(std::move(p.report));
  }
  run.report = json{{"fixture", u.name}, {"points", points}};
  if (run.pass) {
    auto fit = ahat::fit_n_log_n(ns, taus);
    run.spread = fit.spread;
    run.pass = fit.spread <= 4.0;
    run.report["fit"] = json{{"c", fit.c}, {"spread", fit.spread}, {"ratios", fit.ratios}};
  }
  run.report["pass"] = run.pass;
  return run;
}

json to_json(const DyckConfig& c) {
  return json{{"k", c.k},
              {"exhaustive_len", c.exhaustive_len},
              {"random_count", c.random_count},
              {"random_max_len", c.random_max_len},
              {"seed", c.seed}};
}

namespace {

// Even t: uniform symbols. Odd t: closes the innermost open bracket with
// probability 0.45 (correctly nine times in ten) so that long balanced
// strings occur.
std::string dyck_random(const srasp::BracketAlphabet& a, std::uint64_t seed, std::size_t t, int max_len) {
  Rng rng(mix_seed(seed, t));
  const auto k = static_cast<std::int64_t>(a.symbols().size() / 2);
  const auto len = rng.integer(1, max_len);
  auto any = [&] { return a.symbols()[static_cast<std::size_t>(rng.integer(0, 2 * k - 1))]; };
  std::string w, stack;
  for (std::int64_t i = 0; i < len; ++i) {
    if (t % 2 == 1 && !stack.empty() && rng.coin(0.45)) {
      auto pos = a.symbols().find(stack.back());
      stack.pop_back();
      w += rng.coin(0.9) ? a.symbols()[pos + static_cast<std::size_t>(k)] : any();
    } else {
      char c = any();
      if (a.left(c)) stack.push_back(c);
      w += c;
    }
  }
  return w;
}

}  // namespace

DyckRun run_dyck(const DyckConfig& config) {
  srasp::BracketAlphabet alphabet(config.k);
  auto words = all_strings(alphabet.symbols(), config.exhaustive_len);
  const std::size_t exhaustive = words.size();
  const auto stream = mix_seed(config.seed, static_cast<std::uint64_t>(config.k));
  for (std::size_t t = 0; t < config.random_count; ++t)
    words.push_back(dyck_random(alphabet, stream, t, config.random_max_len));

  std::vector<char> bad(words.size(), 0), accepted(words.size(), 0);
  parallel_for(words.size(), [&](std::size_t k) {
    auto program = srasp::dyck_program(words[k], alphabet);
    bad[k] = program != srasp::dyck_oracle(words[k], alphabet);
    accepted[k] = program.back();
  });

  DyckRun run;
  std::size_t positions = 0, accepts = 0;
  std::string first;
  for (std::size_t k = 0; k < words.size(); ++k) {
    positions += words[k].size();
    accepts += accepted[k] ? 1 : 0;
    if (bad[k]) {
      if (first.empty()) first = words[k];
      ++run.mismatches;
    }
  }
  run.report = json{{"k", config.k},
                    {"exhaustive_strings", exhaustive},
                    {"random_strings", words.size() - exhaustive},
                    {"positions", positions},
                    {"accepted", accepts},
                    {"mismatches", run.mismatches}};
  if (!first.empty()) run.report["first_mismatch"] = first;
  return run;
}

}  // namespace softhard::cli
