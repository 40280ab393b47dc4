#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace avrank {

// Derives a seed for a named substream. Streams with distinct (a, b) pairs
// are statistically independent, so replications, tie-breaking, statistic
// noise etc. can all be split off one master seed and replayed exactly.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// mt19937_64 with explicit output transforms. The uniform and normal draws
// are pinned here (rather than std::uniform_real_distribution /
// std::normal_distribution) so that checkpointed state can be restored
// bit-identically and serial/parallel runs agree.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0,1).
  double uniform();

  // Uniform on the open interval (0,1); safe to pass to log() or as
  // smoothing noise where the endpoints are rejected.
  double uniform_open();

  // Standard normal via Box-Muller (second value cached).
  double normal();

  // Uniform integer in [0, bound), bound > 0.
  std::uint64_t uniform_int(std::uint64_t bound);

  std::string serialize() const;
  static Rng deserialize(const std::string& text);

  bool operator==(const Rng& other) const;

 private:
  Rng() = default;
  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace avrank
