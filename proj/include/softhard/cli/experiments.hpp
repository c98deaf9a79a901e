#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"  // nlohmann
#include "softhard/ahat/simulate.hpp"
#include "softhard/compiler/compile.hpp"
#include "softhard/logic/fragment.hpp"
#include "softhard/logic/predicates.hpp"

namespace softhard::cli {

inline constexpr const char* kToolName = "softhard";
inline constexpr const char* kVersion = "1.0.0";

// Wraps results with the tool name, version, command and configuration so
// every report is self-describing.
nlohmann::json envelope(const std::string& command, const nlohmann::json& config,
                        const nlohmann::json& results, bool pass);

compiler::CompileMode parse_mode(const std::string& text);  // "temp/any", "pe/future", ...

// A bundled formula file together with the fragment its formulas belong to
// and the modes it is compiled in.
struct Suite {
  std::string name;
  std::string file;  // relative to the data directory
  logic::Fragment fragment;
  std::vector<compiler::CompileMode> modes;
};

std::vector<Suite> standard_suites();

struct SweepConfig {
  int exhaustive_max_len = 8;
  std::size_t random_count = 200;
  int random_max_len = 64;
  std::uint64_t seed = 1;
  std::string alphabet = "01";
};

nlohmann::json to_json(const SweepConfig& c);

// All strings up to exhaustive_max_len followed by random_count seeded
// random strings with lengths in [1, random_max_len].
std::vector<std::string> sweep_strings(const SweepConfig& c, std::uint64_t stream);

// Stream id for a formula's random strings (stable across runs and modes).
std::uint64_t stream_of(const std::string& text);

struct FormulaResult {
  std::string formula;
  std::string mode;
  std::string fragment;
  int depth = 0;
  int d = 0;
  int layers = 0;
  std::string tau;
  std::size_t strings = 0;
  std::size_t positions = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;  // "w@i" when mismatches > 0
  std::size_t breaches = 0;    // strings whose audit exceeded a budget
  double worst_deviation = 0;
  std::string error;  // compile error, if any

  bool ok() const { return error.empty() && mismatches == 0 && breaches == 0; }
};

nlohmann::json to_json(const FormulaResult& r);

// Compares the readout with the oracle at every position of every sweep
// string, with zero tolerance.
FormulaResult verify_formula(const logic::FormulaPtr& f, compiler::CompileMode mode,
                             const SweepConfig& config, const logic::PredicateRegistry& registry);
FormulaResult verify_compiled(const compiler::CompiledFormula& cf, const SweepConfig& config,
                              const logic::PredicateRegistry& registry);

struct SuiteResult {
  std::string suite;
  std::string mode;
  std::vector<FormulaResult> formulas;
  // At least five formulas, each in the suite fragment with nesting depth
  // at most 3.
  bool well_formed = true;
  bool ok() const;
};

nlohmann::json to_json(const SuiteResult& r);

std::vector<SuiteResult> verify_suite(const Suite& suite, const std::string& data_dir,
                                      const SweepConfig& config, const logic::PredicateRegistry& registry);

// Acceptance by a parity oracle (odd number of ones) at the last position.
struct ParityResult {
  std::string formula;
  std::string mode;
  std::size_t strings = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
};

nlohmann::json to_json(const ParityResult& r);

ParityResult verify_parity(const logic::FormulaPtr& f, compiler::CompileMode mode,
                           const SweepConfig& config, const logic::PredicateRegistry& registry);

struct AhatConfig {
  int exhaustive_max_len = 8;
  std::size_t sampled_count = 1000;
  int sampled_max_len = 32;
  std::size_t calibration_samples = 2000;
  std::uint64_t seed = 1;
  ahat::CalibrationMode mode = ahat::CalibrationMode::Analytic;
};

nlohmann::json to_json(const AhatConfig& c);

struct AhatRun {
  nlohmann::json report;
  bool pass = true;
};

// Exhaustive lengths 1..exhaustive_max_len, then sampled_count inputs with
// lengths uniform in [1, sampled_max_len]; each length gets its own
// calibration and temperature plan.
AhatRun run_ahat(const ahat::AhatSpec& u, const AhatConfig& config);

struct GrowthRun {
  nlohmann::json report;
  double spread = 0;
  bool pass = true;  // spread <= 4
};

GrowthRun run_growth(const ahat::AhatSpec& u, const std::vector<std::int64_t>& ns, const AhatConfig& config);

struct DyckConfig {
  int k = 1;
  int exhaustive_len = 0;  // all strings up to this length
  std::size_t random_count = 0;
  int random_max_len = 32;
  std::uint64_t seed = 1;
};

nlohmann::json to_json(const DyckConfig& c);

struct DyckRun {
  nlohmann::json report;
  std::size_t mismatches = 0;
};

DyckRun run_dyck(const DyckConfig& config);

}  // namespace softhard::cli
