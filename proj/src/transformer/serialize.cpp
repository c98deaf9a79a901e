#include "softhard/transformer/serialize.hpp"

#include <fstream>

#include "softhard/common/error.hpp"

namespace softhard::transformer {

using nlohmann::json;

namespace {

const char* mask_name(Mask m) {
  switch (m) {
    case Mask::None: return "none";
    case Mask::Future: return "future";
    case Mask::Past: return "past";
  }
  return "none";
}

Mask mask_from(const std::string& s) {
  if (s == "none") return Mask::None;
  if (s == "future") return Mask::Future;
  if (s == "past") return Mask::Past;
  throw PreconditionError("unknown mask " + s);
}

const char* weighting_name(WeightingFn::Kind k) {
  switch (k) {
    case WeightingFn::Kind::Softmax: return "softmax";
    case WeightingFn::Kind::SoftmaxTau: return "softmax_tau";
    case WeightingFn::Kind::LHard: return "lhard";
    case WeightingFn::Kind::RHard: return "rhard";
    case WeightingFn::Kind::AHard: return "ahard";
  }
  return "softmax";
}

WeightingFn::Kind weighting_from(const std::string& s) {
  for (auto k : {WeightingFn::Kind::Softmax, WeightingFn::Kind::SoftmaxTau, WeightingFn::Kind::LHard,
                 WeightingFn::Kind::RHard, WeightingFn::Kind::AHard}) {
    if (s == weighting_name(k)) return k;
  }
  throw PreconditionError("unknown weighting " + s);
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const json& doc, Eigen::Index size) {
  if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != size) {
    throw DimensionError("vector of length " + std::to_string(size) + " expected");
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) v[i] = doc[i].get<double>();
  return v;
}

}  // namespace

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Matrix matrix_from_json(const json& doc, Eigen::Index rows, Eigen::Index cols) {
  if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != rows) {
    throw DimensionError("matrix with " + std::to_string(rows) + " rows expected");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = doc[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw DimensionError("matrix row with " + std::to_string(cols) + " entries expected");
    }
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

json to_json(const TemperatureFn& t) {
  const char* kind = "constant";
  if (t.kind == TemperatureFn::Kind::LengthPower) kind = "length_power";
  if (t.kind == TemperatureFn::Kind::PositionPower) kind = "position_power";
  return {{"kind", kind}, {"scale", t.scale}, {"exponent", t.exponent}};
}

TemperatureFn temperature_from_json(const json& doc) {
  TemperatureFn t;
  auto kind = doc.at("kind").get<std::string>();
  if (kind == "constant") {
    t.kind = TemperatureFn::Kind::Constant;
  } else if (kind == "length_power") {
    t.kind = TemperatureFn::Kind::LengthPower;
  } else if (kind == "position_power") {
    t.kind = TemperatureFn::Kind::PositionPower;
  } else {
    throw PreconditionError("unknown temperature kind " + kind);
  }
  t.scale = doc.at("scale").get<double>();
  t.exponent = doc.value("exponent", 0.0);
  if (!(t.scale > 0)) throw PreconditionError("temperature scale must be positive");
  return t;
}

json to_json(const TransformerSpec& spec) {
  json doc;
  doc["alphabet"] = spec.alphabet;
  doc["d"] = spec.d;
  doc["residual"] = spec.residual;
  doc["readout"] = spec.readout;
  json we = json::object();
  for (const auto& [sym, vec] : spec.word_embedding) we[std::string(1, sym)] = vector_to_json(vec);
  doc["word_embedding"] = we;
  json pe = json::array();
  for (const auto& pf : spec.positional) {
    json e = {{"coord", pf.coord}, {"feature", pf.feature.name()}};
    if (pf.feature.kind == PEFeature::Kind::PredBit) e["predicate"] = pf.feature.pred;
    pe.push_back(e);
  }
  doc["positional"] = pe;
  json layers = json::array();
  for (const auto& layer : spec.layers) {
    const auto& a = layer.attention;
    json att = {
        {"d_k", a.wq.rows()},
        {"wq", matrix_to_json(a.wq)},
        {"wk", matrix_to_json(a.wk)},
        {"wv", matrix_to_json(a.wv)},
        {"mask", mask_name(a.mask)},
        {"weighting", {{"kind", weighting_name(a.weighting.kind)}}},
        {"scale_scores", a.scale_scores},
    };
    if (a.weighting.kind == WeightingFn::Kind::SoftmaxTau) {
      att["weighting"]["temperature"] = to_json(a.weighting.tau);
    }
    const auto& f = layer.ffn;
    json ffn = {
        {"d_f", f.w1.rows()},
        {"w1", matrix_to_json(f.w1)},
        {"b1", vector_to_json(f.b1)},
        {"w2", matrix_to_json(f.w2)},
        {"b2", vector_to_json(f.b2)},
    };
    layers.push_back({{"attention", att}, {"ffn", ffn}});
  }
  doc["layers"] = layers;
  return doc;
}

TransformerSpec spec_from_json(const json& doc, const logic::PredicateRegistry& registry) {
  TransformerSpec spec;
  spec.predicates = registry;
  spec.alphabet = doc.at("alphabet").get<std::string>();
  spec.d = doc.at("d").get<int>();
  spec.residual = doc.value("residual", false);
  spec.readout = doc.value("readout", 0);
  for (const auto& [key, vec] : doc.at("word_embedding").items()) {
    if (key.size() != 1) throw PreconditionError("word embedding key must be one symbol: " + key);
    spec.word_embedding[key[0]] = vector_from_json(vec, spec.d);
  }
  for (const auto& e : doc.value("positional", json::array())) {
    spec.positional.push_back(
        {e.at("coord").get<int>(),
         PEFeature::from_name(e.at("feature").get<std::string>(), e.value("predicate", ""))});
  }
  for (const auto& l : doc.value("layers", json::array())) {
    Layer layer;
    const auto& a = l.at("attention");
    auto dk = a.at("d_k").get<Eigen::Index>();
    layer.attention.wq = matrix_from_json(a.at("wq"), dk, spec.d);
    layer.attention.wk = matrix_from_json(a.at("wk"), dk, spec.d);
    layer.attention.wv = matrix_from_json(a.at("wv"), spec.d, spec.d);
    layer.attention.mask = mask_from(a.value("mask", "none"));
    layer.attention.scale_scores = a.value("scale_scores", true);
    const auto& w = a.at("weighting");
    layer.attention.weighting.kind = weighting_from(w.at("kind").get<std::string>());
    if (layer.attention.weighting.kind == WeightingFn::Kind::SoftmaxTau) {
      layer.attention.weighting.tau = temperature_from_json(w.at("temperature"));
    }
    const auto& f = l.at("ffn");
    auto df = f.at("d_f").get<Eigen::Index>();
    layer.ffn.w1 = matrix_from_json(f.at("w1"), df, spec.d);
    layer.ffn.b1 = vector_from_json(f.at("b1"), df);
    layer.ffn.w2 = matrix_from_json(f.at("w2"), spec.d, df);
    layer.ffn.b2 = vector_from_json(f.at("b2"), spec.d);
    spec.layers.push_back(std::move(layer));
  }
  spec.validate();
  return spec;
}

void save_spec(const TransformerSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << to_json(spec).dump(1) << "\n";
}

TransformerSpec load_spec(const std::string& path, const logic::PredicateRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  return spec_from_json(json::parse(in), registry);
}

}  // namespace softhard::transformer
