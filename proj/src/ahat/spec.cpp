#include "softhard/ahat/spec.hpp"

#include <fstream>
#include <sstream>

#include "softhard/common/error.hpp"
#include "softhard/common/rng.hpp"
#include "softhard/transformer/serialize.hpp"

namespace softhard::ahat {

using transformer::Matrix;
using transformer::Vector;
using json = nlohmann::json;

const char* layer_kind_name(LayerKind k) { return k == LayerKind::Uniform ? "uniform" : "tieless"; }

void AhatSpec::validate() const {
  spec.validate();
  if (kinds.size() != spec.layers.size())
    throw PreconditionError("AHAT needs one uniform/tieless tag per layer");
  if (spec.residual) throw PreconditionError("AHAT specs use the non-residual layer form");
  for (const auto& layer : spec.layers) {
    if (layer.attention.weighting.kind != transformer::WeightingFn::Kind::AHard)
      throw PreconditionError("AHAT attention layers must use average-hard weighting");
  }
}

json to_json(const AhatSpec& u) {
  json doc = transformer::to_json(u.spec);
  doc["name"] = u.name;
  for (std::size_t l = 0; l < u.kinds.size(); ++l) doc["layers"][l]["kind"] = layer_kind_name(u.kinds[l]);
  return doc;
}

AhatSpec ahat_from_json(const json& doc) {
  AhatSpec u;
  u.name = doc.value("name", "");
  u.spec = transformer::spec_from_json(doc);
  for (const auto& layer : doc.at("layers")) {
    auto kind = layer.at("kind").get<std::string>();
    if (kind == "uniform") {
      u.kinds.push_back(LayerKind::Uniform);
    } else if (kind == "tieless") {
      u.kinds.push_back(LayerKind::Tieless);
    } else {
      throw PreconditionError("unknown AHAT layer kind " + kind);
    }
  }
  u.validate();
  return u;
}

AhatSpec load_ahat(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  return ahat_from_json(json::parse(in));
}

void save_ahat(const AhatSpec& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot write " + path);
  out << to_json(u).dump(2) << "\n";
}

InputSource InputSource::automatic(std::size_t alphabet_size, std::int64_t n, std::size_t count,
                                   std::uint64_t seed) {
  double total = 1;
  for (std::int64_t i = 0; i < n; ++i) total *= static_cast<double>(alphabet_size);
  if (total <= 65536.0) return exhaustive();
  return sampled(count, seed);
}

std::vector<std::string> InputSource::inputs(const std::string& alphabet, std::int64_t n) const {
  if (n < 1) throw PreconditionError("input length must be positive");
  if (alphabet.empty()) throw PreconditionError("empty alphabet");
  const auto k = alphabet.size();
  std::vector<std::string> out;
  if (kind == Kind::Exhaustive) {
    std::vector<std::size_t> digits(static_cast<std::size_t>(n), 0);
    while (true) {
      std::string w;
      for (auto d : digits) w += alphabet[d];
      out.push_back(std::move(w));
      std::size_t pos = 0;
      while (pos < digits.size() && ++digits[pos] == k) digits[pos++] = 0;
      if (pos == digits.size()) break;
    }
    return out;
  }
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(n)));
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    std::string w;
    for (std::int64_t i = 0; i < n; ++i)
      w += alphabet[static_cast<std::size_t>(rng.integer(0, static_cast<std::int64_t>(k) - 1))];
    out.push_back(std::move(w));
  }
  return out;
}

std::string InputSource::describe() const {
  if (kind == Kind::Exhaustive) return "exhaustive";
  std::ostringstream s;
  s << "sampled(" << count << ", seed " << seed << ")";
  return s.str();
}

namespace {

Matrix unit_rows(int rows, int cols, std::vector<std::pair<int, int>> ones) {
  Matrix m = Matrix::Zero(rows, cols);
  for (auto [r, c] : ones) m(r, c) = 1.0;
  return m;
}

transformer::FFNSpec identity_ffn(int d) {
  transformer::FFNSpec f;
  f.w1 = Matrix::Identity(d, d);
  f.b1 = Vector::Zero(d);
  f.w2 = Matrix::Identity(d, d);
  f.b2 = Vector::Zero(d);
  return f;
}

}  // namespace

AhatSpec flip_flop_ahat() {
  // Coordinates: 0 one, 1 write flag, 2 written bit, 3 i/n.
  AhatSpec u;
  u.name = "flip-flop";
  auto& s = u.spec;
  s.alphabet = "01ri";
  s.d = 4;
  s.readout = 2;
  for (char c : s.alphabet) {
    Vector v = Vector::Zero(4);
    v[0] = 1;
    if (c == '0' || c == '1') v[1] = 1;
    if (c == '1') v[2] = 1;
    s.word_embedding[c] = v;
  }
  s.positional.push_back({3, {transformer::PEFeature::Kind::InvLenPos, ""}});
  transformer::Layer l;
  l.attention.wq = unit_rows(1, 4, {{0, 0}});
  l.attention.wk = unit_rows(1, 4, {{0, 1}, {0, 3}});
  l.attention.wv = unit_rows(4, 4, {{0, 0}, {2, 2}});
  l.attention.mask = transformer::Mask::Future;
  l.attention.weighting = transformer::WeightingFn::ahard();
  l.ffn = identity_ffn(4);
  s.layers.push_back(l);
  u.kinds = {LayerKind::Tieless};
  u.validate();
  return u;
}

AhatSpec counter_ahat() {
  // Coordinates: 0 one, 1 is-one / density, 2 i/n / (i+1)/(2n).
  AhatSpec u;
  u.name = "counter";
  auto& s = u.spec;
  s.alphabet = "01";
  s.d = 3;
  s.readout = 1;
  for (char c : s.alphabet) {
    Vector v = Vector::Zero(3);
    v[0] = 1;
    if (c == '1') v[1] = 1;
    s.word_embedding[c] = v;
  }
  s.positional.push_back({2, {transformer::PEFeature::Kind::InvLenPos, ""}});

  transformer::Layer avg;
  avg.attention.wq = Matrix::Zero(1, 3);
  avg.attention.wk = Matrix::Zero(1, 3);
  avg.attention.wv = Matrix::Identity(3, 3);
  avg.attention.mask = transformer::Mask::Future;
  avg.attention.weighting = transformer::WeightingFn::ahard();
  avg.ffn = identity_ffn(3);

  transformer::Layer last;
  last.attention.wq = unit_rows(1, 3, {{0, 0}});
  last.attention.wk = unit_rows(1, 3, {{0, 2}});
  last.attention.wv = unit_rows(3, 3, {{0, 0}, {1, 1}});
  last.attention.mask = transformer::Mask::None;
  last.attention.weighting = transformer::WeightingFn::ahard();
  last.ffn = identity_ffn(3);

  s.layers = {avg, last};
  u.kinds = {LayerKind::Uniform, LayerKind::Tieless};
  u.validate();
  return u;
}

}  // namespace softhard::ahat
