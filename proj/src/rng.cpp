#include "paracalc/rng.hpp"

#include <cmath>

namespace paracalc::rng {

double uniform(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  // Pre-mix every component before chaining.  Chaining raw keys through
  // combine() is xor-linear in the inputs, so structured tuples (consecutive
  // seeds against shifted mode indices) can collide; a full avalanche per
  // component removes that.
  uint64_t k = mix(seed ^ 0xa0761d6478bd642full);
  k = mix(k ^ mix(a ^ 0xe7037ed1a0b428dbull));
  k = mix(k ^ mix(b ^ 0x8ebc6af09c88c6e3ull));
  k = mix(k ^ mix(c ^ 0x589965cc75374cc3ull));
  // Map to (0,1]: top 53 bits, then shift away from zero.
  return (static_cast<double>(k >> 11) + 1.0) * 0x1.0p-53;
}

std::pair<double, double> normal_pair(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
  const double u1 = uniform(seed, a, b, c);
  const double u2 = uniform(combine(seed, 0x0ddba11ull), a, b, c);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * 3.14159265358979323846 * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

}  // namespace paracalc::rng
