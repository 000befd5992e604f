#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace susci {

// Seeded random stream. Engine is std::mt19937_64, whose output sequence is
// fixed by the standard; all transforms below are implemented here so the
// draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream derived from (seed, path). Streams with different
  // paths are decorrelated by SplitMix64 hashing, so work can be split into
  // fixed-size tasks whose results do not depend on scheduling.
  static Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  // Uniform integer on [0, n). Multiply-shift mapping; n must be > 0.
  std::uint32_t index(std::uint32_t n);
  // Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace susci
