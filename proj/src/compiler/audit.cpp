#include "softhard/compiler/audit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "softhard/common/error.hpp"
#include "softhard/transformer/forward.hpp"

namespace softhard::compiler {

double probe_deviation(Probe::Kind kind, double value) {
  if (kind == Probe::Kind::Integer) return std::abs(value - std::round(value));
  if (value <= 0.0 || value >= 1.0) return 0.0;
  return std::min(value, 1.0 - value);
}

AuditReport audit_errors(const CompiledFormula& cf, std::string_view w) {
  transformer::Model model(cf.spec);
  return audit_activations(cf, model.forward(w));
}

AuditReport audit_activations(const CompiledFormula& cf, const transformer::ActivationSequence& h) {
  // Residual layers never overwrite a coordinate, so every probe can be
  // read from the final activations.
  AuditReport report;
  report.per_layer.assign(cf.spec.layers.size(), 0.0);
  for (const auto& p : cf.probes) {
    AuditEntry e{p.label, p.layer, p.kind, p.budget, 0.0, 1};
    for (Eigen::Index i = 0; i < h.rows(); ++i) {
      double v = p.bias;
      for (const auto& [coord, weight] : p.form) v += weight * h(i, coord);
      double dev = probe_deviation(p.kind, v);
      if (dev > e.worst) {
        e.worst = dev;
        e.worst_position = static_cast<int>(i + 1);
      }
    }
    if (p.layer >= 1 && p.layer <= static_cast<int>(report.per_layer.size())) {
      auto& slot = report.per_layer[p.layer - 1];
      slot = std::max(slot, e.worst);
    }
    report.worst = std::max(report.worst, e.worst);
    if (e.worst > e.budget) report.ok = false;
    report.entries.push_back(std::move(e));
  }
  return report;
}

AuditReport compiled_error_audit(const CompiledFormula& cf, std::string_view w) {
  auto report = audit_errors(cf, w);
  if (!report.ok) {
    throw ContractBreach("approximation budget exceeded on \"" + std::string(w) + "\":\n" +
                         report.describe());
  }
  return report;
}

std::string AuditReport::describe() const {
  std::ostringstream out;
  for (const auto& e : entries) {
    out << "layer " << e.layer << "  " << e.label << "  worst " << e.worst << " at " << e.worst_position
        << " (budget " << e.budget << ")" << (e.worst > e.budget ? "  BREACH" : "") << "\n";
  }
  return out.str();
}

}  // namespace softhard::compiler
