#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "softhard/compiler/compile.hpp"

namespace softhard::compiler {

struct AuditEntry {
  std::string label;
  int layer;
  Probe::Kind kind;
  double budget;
  double worst;       // largest deviation over positions
  int worst_position;  // 1-based
};

struct AuditReport {
  std::vector<AuditEntry> entries;
  // Worst deviation among probes produced by each layer (index 0 = layer 1).
  std::vector<double> per_layer;
  double worst = 0.0;
  bool ok = true;

  std::string describe() const;
};

// Deviation of a probe value from its allowed region.
double probe_deviation(Probe::Kind kind, double value);

AuditReport audit_errors(const CompiledFormula& cf, std::string_view w);
// Same, from the final activations of an existing forward pass.
AuditReport audit_activations(const CompiledFormula& cf, const transformer::ActivationSequence& h);

// Same as audit_errors but throws ContractBreach when any probe exceeds its
// budget.
AuditReport compiled_error_audit(const CompiledFormula& cf, std::string_view w);

}  // namespace softhard::compiler
