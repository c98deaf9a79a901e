#pragma once

#include <map>
#include <string>
#include <vector>

#include "softhard/logic/formula.hpp"
#include "softhard/logic/predicates.hpp"
#include "softhard/transformer/spec.hpp"

namespace softhard::compiler {

enum class Scaling { TempScaling, UnboundedPE };
enum class Masking { Any, FutureOnly };

struct CompileMode {
  Scaling scaling = Scaling::TempScaling;
  Masking masking = Masking::Any;

  std::string describe() const;
  bool operator==(const CompileMode&) const = default;
};

struct CompileOptions {
  std::string alphabet = "01";
  // Tie-breaking strength; softmax is within 4 e^-gamma of hardmax.
  double gamma = 3.0;
};

// A value whose approximation quality is checked by the audit. The value at
// each position is form . h + bias on the final activations.
struct Probe {
  enum class Kind {
    Boolean,  // must lie in (-inf, budget] or [1 - budget, inf)
    Integer,  // must lie within budget of an integer
  };
  std::string label;
  std::vector<std::pair<int, double>> form;
  double bias = 0.0;
  Kind kind = Kind::Boolean;
  double budget = 0.25;
  int layer = 0;
};

struct CompiledFormula {
  logic::FormulaPtr formula;
  transformer::TransformerSpec spec;
  CompileMode mode;
  transformer::TemperatureFn tau;
  std::vector<transformer::PEFeature> pe_features;
  // Canonical subformula text -> coordinate holding its exact 0/1 value.
  std::map<std::string, int> coordinates;
  // Canonical subformula text -> layer after which its coordinate is final
  // (0 for embedding-level values).
  std::map<std::string, int> ready_layer;
  std::vector<Probe> probes;
  // One line per layer naming the gadgets it hosts.
  std::vector<std::string> trace;
};

// Throws ModeError when the formula does not fit the masking policy or the
// mode/operator combination is not supported.
CompiledFormula compile(const logic::FormulaPtr& f, CompileMode mode,
                        const logic::PredicateRegistry& registry, const CompileOptions& options = {});

}  // namespace softhard::compiler
