#pragma once

#include <cstdint>
#include <random>

namespace concord {

/// Named RNG streams. Each (seed, stream) pair seeds an independent generator,
/// so e.g. graph topology and edge weights can be reproduced separately.
enum class Stream : std::uint64_t {
  Topology = 1,
  Weights = 2,
  Samples = 3,
  Test = 4,
};

/**
 * std::mt19937_64 seeded through SplitMix64 of (seed, stream). Uniform and
 * normal variates are derived here rather than by <random> distributions,
 * whose output is implementation-defined, so draws are identical on every
 * platform.
 */
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace concord
