#pragma once

#include <cstdint>
#include <random>

namespace uwbrss {

// splitmix64 finalizer, used to spread seeds across substreams.
std::uint64_t mix64(std::uint64_t x);

// Deterministic random stream. All distributions are derived from the raw
// mt19937_64 output with fixed arithmetic, so sequences are identical across
// platforms and standard library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream for one cell of a seeded experiment, e.g.
  // (distance index, gain index, packet index).
  static Rng substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1); 53-bit resolution.
  double uniform();
  double uniform(double lo, double hi);

  // Gaussian via Box-Muller; two uniforms per draw, no cached spare.
  double normal(double sigma);

  // Uniform phase in [0, 2*pi).
  double angle();

 private:
  std::mt19937_64 engine_;
};

}  // namespace uwbrss
