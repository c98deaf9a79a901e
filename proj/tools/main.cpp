#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "softhard/ahat/spec.hpp"
#include "softhard/bounds/bounds.hpp"
#include "softhard/cli/experiments.hpp"
#include "softhard/common/error.hpp"
#include "softhard/compiler/audit.hpp"
#include "softhard/logic/eval.hpp"
#include "softhard/logic/parser.hpp"
#include "softhard/srasp/dyck.hpp"
#include "softhard/transformer/forward.hpp"
#include "softhard/transformer/serialize.hpp"

using namespace softhard;
using nlohmann::json;

namespace {

struct Output {
  std::string format = "json";
  std::string path;
};

std::string number(double x) { return json(x).dump(); }

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (k) out += ',';
    const auto& c = cells[k];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      out += c;
    } else {
      out += '"';
      for (char ch : c) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      out += '"';
    }
  }
  return out + "\n";
}

void emit(const Output& out, const json& report, const std::vector<std::vector<std::string>>& csv) {
  std::string text;
  if (out.format == "csv") {
    for (const auto& row : csv) text += csv_line(row);
  } else {
    text = report.dump(2) + "\n";
  }
  if (out.path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(out.path, std::ios::binary);
    if (!f) throw PreconditionError("cannot write " + out.path);
    f << text;
  }
}

void add_output(CLI::App* cmd, Output& out) {
  cmd->add_option("--format", out.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("-o,--output", out.path, "Write the report to a file instead of stdout");
}

logic::PredicateRegistry registry_from(const std::string& path) {
  logic::PredicateRegistry reg;
  if (!path.empty()) reg.load_file(path);
  return reg;
}

ahat::AhatSpec fixture(const std::string& name) {
  if (name == "flip-flop") return ahat::flip_flop_ahat();
  if (name == "counter") return ahat::counter_ahat();
  return ahat::load_ahat(name);
}

ahat::CalibrationMode calibration_mode(const std::string& name) {
  return name == "empirical" ? ahat::CalibrationMode::Empirical : ahat::CalibrationMode::Analytic;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact compilation of temporal logic into softmax transformers, and the checks around it"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (overrides SOFTHARD_THREADS)")->check(CLI::PositiveNumber);

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Compile a formula into a transformer spec");
  std::string formula_text, mode_text = "temp/any", alphabet = "01", predicates_path;
  Output compile_out;
  compile_cmd->add_option("formula", formula_text, "Formula text")->required();
  compile_cmd->add_option("--mode", mode_text, "temp/any, temp/future, pe/any or pe/future");
  compile_cmd->add_option("--alphabet", alphabet, "Input alphabet");
  compile_cmd->add_option("--predicates", predicates_path, "JSON file of numerical predicate tables");
  compile_cmd->add_option("-o,--output", compile_out.path, "Write the spec to a file instead of stdout");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a formula, and optionally its compiled transformer, on a word");
  std::string word;
  bool eval_compiled = false;
  Output eval_out;
  eval_cmd->add_option("formula", formula_text, "Formula text")->required();
  eval_cmd->add_option("word", word, "Input word")->required();
  eval_cmd->add_option("--mode", mode_text, "Compilation mode for --compiled");
  eval_cmd->add_flag("--compiled", eval_compiled, "Also run the compiled transformer and its audit");
  eval_cmd->add_option("--alphabet", alphabet, "Input alphabet");
  eval_cmd->add_option("--predicates", predicates_path, "JSON file of numerical predicate tables");
  add_output(eval_cmd, eval_out);

  // verify-logic
  auto* logic_cmd = app.add_subcommand("verify-logic", "Check compiled formula suites against the evaluator");
  cli::SweepConfig sweep;
  std::string suite_name = "all", data_dir = SOFTHARD_DATA_DIR;
  Output logic_out;
  logic_cmd->add_option("--suite", suite_name, "Suite name, or all");
  logic_cmd->add_option("--seed", sweep.seed, "Random seed");
  logic_cmd->add_option("--exhaustive", sweep.exhaustive_max_len, "Check every string up to this length");
  logic_cmd->add_option("--random", sweep.random_count, "Random strings per formula");
  logic_cmd->add_option("--max-len", sweep.random_max_len, "Longest random string");
  logic_cmd->add_option("--data-dir", data_dir, "Directory holding formulas/");
  add_output(logic_cmd, logic_out);

  // verify-ahat
  auto* ahat_cmd = app.add_subcommand("verify-ahat", "Simulate an AHAT with a softmax transformer and check the error budgets");
  cli::AhatConfig ahat_config;
  std::string fixture_name = "flip-flop", calibration = "analytic";
  std::vector<std::int64_t> growth_ns;
  Output ahat_out;
  ahat_cmd->add_option("--fixture", fixture_name, "flip-flop, counter, or a path to an AHAT JSON file");
  ahat_cmd->add_option("--calibration", calibration, "Activation bounds")->check(CLI::IsMember({"analytic", "empirical"}));
  ahat_cmd->add_option("--seed", ahat_config.seed, "Random seed");
  ahat_cmd->add_option("--exhaustive", ahat_config.exhaustive_max_len, "Check every input up to this length");
  ahat_cmd->add_option("--sampled", ahat_config.sampled_count, "Number of sampled inputs");
  ahat_cmd->add_option("--max-len", ahat_config.sampled_max_len, "Longest sampled input");
  ahat_cmd->add_option("--calibration-samples", ahat_config.calibration_samples, "Extra inputs per length for calibration");
  ahat_cmd->add_option("--growth", growth_ns, "Lengths for the 1/tau ~ n log n fit (e.g. 4 8 16 32 64)");
  add_output(ahat_cmd, ahat_out);

  // verify-bounds
  auto* bounds_cmd = app.add_subcommand("verify-bounds", "Check the closed-form approximation bounds on random instances");
  std::size_t trials = 1000;
  std::uint64_t bounds_seed = 1;
  Output bounds_out;
  bounds_cmd->add_option("--trials", trials, "Trials per check");
  bounds_cmd->add_option("--seed", bounds_seed, "Random seed");
  add_output(bounds_cmd, bounds_out);

  // dyck
  auto* dyck_cmd = app.add_subcommand("dyck", "Run the Dyck-k program against the stack oracle");
  cli::DyckConfig dyck;
  std::string dyck_word;
  Output dyck_out;
  dyck_cmd->add_option("-k", dyck.k, "Bracket types")->check(CLI::Range(1, 4));
  dyck_cmd->add_option("--word", dyck_word, "Trace the program on one word instead of sweeping");
  dyck_cmd->add_option("--exhaustive", dyck.exhaustive_len, "Check every string up to this length");
  dyck_cmd->add_option("--random", dyck.random_count, "Random strings");
  dyck_cmd->add_option("--max-len", dyck.random_max_len, "Longest random string");
  dyck_cmd->add_option("--seed", dyck.seed, "Random seed");
  add_output(dyck_cmd, dyck_out);

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) setenv("SOFTHARD_THREADS", std::to_string(threads).c_str(), 1);

  try {
    if (*compile_cmd) {
      auto reg = registry_from(predicates_path);
      auto f = logic::parse_formula(formula_text, alphabet, reg);
      compiler::CompileOptions options;
      options.alphabet = alphabet;
      auto cf = compiler::compile(f, cli::parse_mode(mode_text), reg, options);
      auto spec = transformer::to_json(cf.spec);
      spec["formula"] = logic::to_string(*cf.formula);
      spec["mode"] = cf.mode.describe();
      spec["tau"] = cf.tau.describe();
      spec["trace"] = cf.trace;
      Output out = compile_out;
      emit(out, spec, {});
      return 0;
    }

    if (*eval_cmd) {
      auto reg = registry_from(predicates_path);
      auto f = logic::parse_formula(formula_text, alphabet, reg);
      auto truth = logic::eval_formula(*f, word, reg);
      json positions = json::array();
      std::vector<std::vector<std::string>> csv = {{"position", "symbol", "oracle"}};
      for (std::size_t i = 0; i < word.size(); ++i) {
        positions.push_back(json{{"position", i + 1}, {"symbol", std::string(1, word[i])}, {"oracle", truth[i]}});
        csv.push_back({std::to_string(i + 1), std::string(1, word[i]), truth[i] ? "1" : "0"});
      }
      json report{{"formula", logic::to_string(*f)}, {"word", word}};
      bool pass = true;
      if (eval_compiled) {
        compiler::CompileOptions options;
        options.alphabet = alphabet;
        auto cf = compiler::compile(f, cli::parse_mode(mode_text), reg, options);
        auto h = transformer::forward(cf.spec, word);
        csv[0].push_back("transformer");
        for (std::size_t i = 0; i < word.size(); ++i) {
          double v = h(static_cast<Eigen::Index>(i), cf.spec.readout);
          positions[i]["transformer"] = v;
          csv[i + 1].push_back(number(v));
          pass = pass && v == (truth[i] ? 1.0 : 0.0);
        }
        auto audit = compiler::audit_activations(cf, h);
        report["mode"] = cf.mode.describe();
        report["audit"] = json{{"worst", audit.worst}, {"ok", audit.ok}, {"per_layer", audit.per_layer}};
        pass = pass && audit.ok;
      }
      report["positions"] = positions;
      report["pass"] = pass;
      emit(eval_out, report, csv);
      return pass ? 0 : 1;
    }

    if (*logic_cmd) {
      logic::PredicateRegistry reg;
      json results = json::array();
      std::vector<std::vector<std::string>> csv = {
          {"suite", "mode", "formula", "strings", "positions", "mismatches", "audit_breaches", "worst_deviation", "ok"}};
      bool pass = true, found = false;
      for (const auto& suite : cli::standard_suites()) {
        if (suite_name != "all" && suite_name != suite.name) continue;
        found = true;
        for (const auto& r : cli::verify_suite(suite, data_dir, sweep, reg)) {
          pass = pass && r.ok();
          results.push_back(cli::to_json(r));
          for (const auto& f : r.formulas)
            csv.push_back({r.suite, r.mode, f.formula, std::to_string(f.strings), std::to_string(f.positions),
                           std::to_string(f.mismatches), std::to_string(f.breaches), number(f.worst_deviation),
                           f.ok() ? "1" : "0"});
        }
      }
      if (!found) throw PreconditionError("unknown suite " + suite_name);
      emit(logic_out, cli::envelope("verify-logic", cli::to_json(sweep), results, pass), csv);
      return pass ? 0 : 1;
    }

    if (*ahat_cmd) {
      ahat_config.mode = calibration_mode(calibration);
      auto u = fixture(fixture_name);
      auto run = cli::run_ahat(u, ahat_config);
      json results{{"simulation", run.report}};
      bool pass = run.pass;
      std::vector<std::vector<std::string>> csv = {{"set", "n", "inputs", "tau", "layer", "error", "budget", "ok"}};
      for (const char* set : {"exhaustive", "sampled"})
        for (const auto& p : run.report[set]) {
          if (!p.contains("layers")) {
            csv.push_back({set, p["n"].dump(), p["inputs"].dump(), "", "", "", "", "0"});
            continue;
          }
          for (const auto& l : p["layers"])
            csv.push_back({set, p["n"].dump(), p["inputs"].dump(), p["tau"].dump(), l["layer"].dump(),
                           l["error"].dump(), l["budget"].dump(), l["ok"].get<bool>() ? "1" : "0"});
        }
      if (!growth_ns.empty()) {
        auto growth = cli::run_growth(u, growth_ns, ahat_config);
        results["growth"] = growth.report;
        pass = pass && growth.pass;
      }
      auto config = cli::to_json(ahat_config);
      config["fixture"] = u.name;
      config["growth"] = growth_ns;
      emit(ahat_out, cli::envelope("verify-ahat", config, results, pass), csv);
      return pass ? 0 : 1;
    }

    if (*bounds_cmd) {
      json results = json::array();
      std::vector<std::vector<std::string>> csv = {
          {"check", "trials", "worst", "bound_at_worst", "margin", "max_ratio", "violations"}};
      bool pass = true;
      for (const auto& r : bounds::check_all(trials, bounds_seed)) {
        pass = pass && r.ok();
        results.push_back(bounds::to_json(r));
        csv.push_back({r.lemma, std::to_string(r.trials), number(r.worst), number(r.bound_at_worst),
                       number(r.margin), number(r.max_ratio), std::to_string(r.violations)});
        for (const auto& p : r.parts)
          csv.push_back({r.lemma + "/" + p.lemma, std::to_string(p.trials), number(p.worst),
                         number(p.bound_at_worst), number(p.margin), number(p.max_ratio),
                         std::to_string(p.violations)});
      }
      json config{{"trials", trials}, {"seed", bounds_seed}};
      emit(bounds_out, cli::envelope("verify-bounds", config, results, pass), csv);
      return pass ? 0 : 1;
    }

    if (*dyck_cmd) {
      if (!dyck_word.empty()) {
        srasp::BracketAlphabet a(dyck.k);
        auto t = srasp::dyck_trace(dyck_word, a);
        auto oracle = srasp::dyck_oracle(dyck_word, a);
        json rows = json::array();
        std::vector<std::vector<std::string>> csv = {
            {"position", "symbol", "sleft", "sright", "d", "check", "er1", "er2", "okprefix", "out", "oracle"}};
        for (std::size_t i = 0; i < dyck_word.size(); ++i) {
          std::string sym(1, dyck_word[i]), chk(1, t.check[i]);
          rows.push_back(json{{"position", i + 1}, {"symbol", sym}, {"sleft", t.sleft[i]},
                              {"sright", t.sright[i]}, {"d", t.d[i]}, {"check", chk},
                              {"er1", bool(t.er1[i])}, {"er2", bool(t.er2[i])},
                              {"okprefix", bool(t.okprefix[i])}, {"out", bool(t.out[i])},
                              {"oracle", bool(oracle[i])}});
          csv.push_back({std::to_string(i + 1), sym, std::to_string(t.sleft[i]), std::to_string(t.sright[i]),
                         std::to_string(t.d[i]), chk, t.er1[i] ? "1" : "0", t.er2[i] ? "1" : "0",
                         t.okprefix[i] ? "1" : "0", t.out[i] ? "1" : "0", oracle[i] ? "1" : "0"});
        }
        bool pass = t.out == oracle;
        emit(dyck_out, json{{"k", dyck.k}, {"word", dyck_word}, {"trace", rows}, {"pass", pass}}, csv);
        return pass ? 0 : 1;
      }
      auto run = cli::run_dyck(dyck);
      const auto& r = run.report;
      std::vector<std::vector<std::string>> csv = {
          {"k", "exhaustive_strings", "random_strings", "positions", "accepted", "mismatches"},
          {r["k"].dump(), r["exhaustive_strings"].dump(), r["random_strings"].dump(), r["positions"].dump(),
           r["accepted"].dump(), r["mismatches"].dump()}};
      bool pass = run.mismatches == 0;
      emit(dyck_out, cli::envelope("dyck", cli::to_json(dyck), r, pass), csv);
      return pass ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
