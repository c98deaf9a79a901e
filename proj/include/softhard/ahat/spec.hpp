#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"  // nlohmann
#include "softhard/transformer/spec.hpp"

namespace softhard::ahat {

enum class LayerKind { Uniform, Tieless };

const char* layer_kind_name(LayerKind k);

// An average-hard attention transformer whose layers are tagged uniform or
// tieless. The tags are claims; check_uniform_tieless verifies them.
struct AhatSpec {
  std::string name;
  transformer::TransformerSpec spec;
  std::vector<LayerKind> kinds;

  // Shapes, one tag per layer, AHard weighting everywhere, no residual.
  void validate() const;
};

nlohmann::json to_json(const AhatSpec& u);
AhatSpec ahat_from_json(const nlohmann::json& doc);
AhatSpec load_ahat(const std::string& path);
void save_ahat(const AhatSpec& u, const std::string& path);

// Which inputs of a fixed length are probed.
struct InputSource {
  enum class Kind { Exhaustive, Sampled };
  Kind kind = Kind::Exhaustive;
  std::size_t count = 10000;
  std::uint64_t seed = 1;

  static InputSource exhaustive() { return {Kind::Exhaustive, 0, 0}; }
  static InputSource sampled(std::size_t count, std::uint64_t seed) {
    return {Kind::Sampled, count, seed};
  }
  // Exhaustive when |alphabet|^n <= 4^8, otherwise sampled.
  static InputSource automatic(std::size_t alphabet_size, std::int64_t n, std::size_t count,
                               std::uint64_t seed);

  std::vector<std::string> inputs(const std::string& alphabet, std::int64_t n) const;
  std::string describe() const;
};

// Flip-flop state tracker over {0,1,r,i}: '0'/'1' write a bit, 'r' reads
// and 'i' ignores. One tieless future-masked layer retrieves the rightmost
// write at or before i with scores write_j + j/n (gap 1/n); coordinate 2 of
// the output holds the current state (0 before any write).
AhatSpec flip_flop_ahat();

// Two layers over {0,1}: a uniform future-masked layer computes the prefix
// density of ones and the positional value (i+1)/(2n); a tieless unmasked
// layer then retrieves the density at the last position (gap 1/(2n)), so
// coordinate 1 of the output is the fraction of ones in the whole input.
AhatSpec counter_ahat();

}  // namespace softhard::ahat
