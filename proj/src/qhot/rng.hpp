#pragma once

#include <cstdint>
#include <span>

namespace qhot {

// Deterministic random number generator (xoshiro256** seeded through
// SplitMix64). All sampling in the toolkit goes through this class so that a
// fixed seed reproduces every stream bit for bit, independently of the
// standard library and of how work is split across threads.
//
// Parallel code derives one independent generator per trial index with
// for_stream(seed, index); results are then identical for any worker count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent substream for (seed, stream). Streams with different indices
  // are decorrelated by an extra SplitMix64 avalanche pass.
  static Rng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  // Exact binomial sample. Small means use chop-down inversion, large means
  // the BTRS transformed-rejection algorithm (Hormann 1993).
  std::int64_t binomial(std::int64_t n, double p);

  // Index draw from a normalized probability vector (CDF scan).
  int categorical(std::span<const double> probs);

 private:
  std::uint64_t state_[4];
  double cached_normal_ = 0.0;
  bool have_cached_normal_ = false;

  std::int64_t binomial_inversion(std::int64_t n, double p);
  std::int64_t binomial_btrs(std::int64_t n, double p);
};

}  // namespace qhot
