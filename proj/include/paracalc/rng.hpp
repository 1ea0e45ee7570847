#pragma once

#include <cstdint>
#include <utility>

namespace paracalc {

/// Counter-based deterministic random streams.  Every draw is a pure
/// function of (seed, key...), so results are independent of evaluation
/// order and worker count.
namespace rng {

[[nodiscard]] constexpr uint64_t mix(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

[[nodiscard]] constexpr uint64_t combine(uint64_t a, uint64_t b) {
  return mix(a ^ (0x632be59bd9b4e019ull + (b << 1)));
}

/// Uniform draw in (0,1] keyed by (seed, a, b, c).
[[nodiscard]] double uniform(uint64_t seed, uint64_t a, uint64_t b, uint64_t c);

/// Independent standard normal pair keyed by (seed, a, b, c), via Box-Muller.
[[nodiscard]] std::pair<double, double> normal_pair(uint64_t seed, uint64_t a, uint64_t b,
                                                    uint64_t c);

/// Derived seed for sample index i of a Monte-Carlo family.
[[nodiscard]] inline uint64_t derive_seed(uint64_t seed, uint64_t i) {
  return combine(combine(seed, 0x5ca1ab1eull), i);
}

}  // namespace rng
}  // namespace paracalc
