// Deterministic random source: xoshiro256++ engine plus the variate
// samplers the library needs. Two runs with equal seeds and equal draw
// order are bit-identical.
#pragma once

#include <cstdint>

namespace dnorm {

// splitmix64 finalizer; used for seeding and stream derivation.
std::uint64_t mix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Stream k of a master seed: seeded with mix64(seed ^ k). Streams with
  // distinct k are statistically independent for practical purposes.
  static Rng stream(std::uint64_t seed, std::uint64_t k) { return Rng(mix64(seed ^ k)); }

  std::uint64_t next_u64();

  // Uniform on the open interval (0,1); never returns 0 or 1.
  double uniform01();

  // Unbiased uniform integer in [0, n).
  std::uint64_t uniform_below(std::uint64_t n);

  // Standard normal via Box-Muller (two uniforms per variate, no caching).
  double normal();

  // Standard exponential, -log(U).
  double exponential();

  // Gamma(alpha, 1). Marsaglia-Tsang rejection for alpha >= 1; for
  // alpha < 1 the boost Gamma(alpha+1) * U^(1/alpha). Valid for all
  // alpha > 0 including the heavy-underflow regime alpha << 1, where
  // variates may round to subnormals or zero.
  double gamma(double alpha);

 private:
  std::uint64_t s_[4];
};

}  // namespace dnorm
