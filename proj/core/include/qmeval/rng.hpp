#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace qmeval {

// SplitMix64 finaliser; bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Portable random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; the conversions to bounded integers,
// uniforms and normals are defined here rather than delegated to the
// <random> distributions, which differ between standard libraries.
//
// Stream splitting: the stream for (seed, a, b) is seeded with
// mix64(mix64(mix64(seed) ^ a) + b)
// so every (grid point, replicate) owns an independent stream and results
// do not depend on the order in which replicates are scheduled.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);
  static RandomStream child(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

  std::uint64_t next() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer in [0, bound); bound > 0. Rejection-debiased modulo.
  std::uint64_t below(std::uint64_t bound);
  // Standard normal via Box-Muller (one draw per call).
  double normal();

 private:
  std::mt19937_64 engine_;
};

// k distinct indices from [0, population), returned in ascending order.
std::vector<std::size_t> sample_without_replacement(RandomStream& rng, std::size_t population, std::size_t k);

}  // namespace qmeval
