#include "uwbrss/rng.hpp"

#include <cmath>
#include <numbers>

namespace uwbrss {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                   std::uint64_t c) {
  std::uint64_t s = mix64(seed);
  s = mix64(s ^ (a + 0x100000001b3ull));
  s = mix64(s ^ (b + 0xcbf29ce484222325ull));
  s = mix64(s ^ (c + 0x27d4eb2f165667c5ull));
  return Rng(s);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double sigma) {
  // Offset keeps u1 strictly positive so the log is finite.
  double u1 = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::angle() { return 2.0 * std::numbers::pi * uniform(); }

}  // namespace uwbrss
