#pragma once

#include <string>

#include "json.hpp"  // nlohmann
#include "softhard/transformer/spec.hpp"

namespace softhard::transformer {

nlohmann::json to_json(const TransformerSpec& spec);
// Predicates named by PredBit features must be present in `registry`.
TransformerSpec spec_from_json(const nlohmann::json& doc,
                               const logic::PredicateRegistry& registry = {});

nlohmann::json to_json(const TemperatureFn& t);
TemperatureFn temperature_from_json(const nlohmann::json& doc);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& doc, Eigen::Index rows, Eigen::Index cols);

void save_spec(const TransformerSpec& spec, const std::string& path);
TransformerSpec load_spec(const std::string& path, const logic::PredicateRegistry& registry = {});

}  // namespace softhard::transformer
