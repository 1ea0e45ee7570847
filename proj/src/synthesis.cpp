#include "paracalc/synthesis.hpp"

#include <cmath>

#include "paracalc/fft.hpp"
#include "paracalc/partition.hpp"
#include "paracalc/rng.hpp"

namespace paracalc {

namespace {

// Canonical half-lattice: one representative per +-k pair, excluding k=0
// and the Nyquist rows.
bool canonical(int k1, int k2) { return k2 > 0 || (k2 == 0 && k1 > 0); }

}  // namespace

Field synth_holder(const Grid& grid, double alpha, uint64_t seed, double amplitude) {
  SpectralField s(grid);
  const int half = grid.n / 2;
  for (int i = 0; i < grid.n; ++i) {
    const int k1 = grid.wavenumber(i);
    if (k1 == -half) continue;
    for (int j = 0; j < grid.n; ++j) {
      const int k2 = grid.wavenumber(j);
      if (k2 == -half || !canonical(k1, k2)) continue;
      const double r = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
      const double mag = std::pow(r, -alpha - 1.0);
      const double phi = two_pi * rng::uniform(seed, static_cast<uint64_t>(i),
                                               static_cast<uint64_t>(j), 0x5e1f);
      const std::complex<double> c = std::polar(mag, phi);
      s.at_wavenumber(k1, k2) = c;
      s.at_wavenumber(-k1, -k2) = std::conj(c);
    }
  }
  Field f = from_spectral(s);
  const double sup = f.sup_norm();
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

Field synth_lacunary(const Grid& grid, double alpha, uint64_t seed) {
  SpectralField s(grid);
  const DyadicPartition& part = make_partition(grid);
  for (int j = -1; j <= part.J; ++j) {
    const int k = j < 1 ? j + 2 : 3 << (j - 1);
    const double amp = std::pow(2.0, -alpha * j);
    double phi = 0.0;
    bool on_x2 = false;
    if (seed != 0) {
      phi = two_pi * rng::uniform(seed, static_cast<uint64_t>(j + 1), 0, 0x1ac0);
      on_x2 = (j & 1) != 0;
    }
    // Half weight on each of the +-k modes so the level is amp * cos(k x + phi).
    const std::complex<double> mode = std::polar(amp * two_pi * two_pi * 0.5, phi);
    if (on_x2) {
      s.at_wavenumber(0, k) = mode;
      s.at_wavenumber(0, -k) = std::conj(mode);
    } else {
      s.at_wavenumber(k, 0) = mode;
      s.at_wavenumber(-k, 0) = std::conj(mode);
    }
  }
  return from_spectral(s);
}

Field synth_radial_power(const Grid& grid, double s_exp) {
  SpectralField s(grid);
  const int half = grid.n / 2;
  for (int i = 0; i < grid.n; ++i) {
    const int k1 = grid.wavenumber(i);
    if (k1 == -half) continue;
    for (int j = 0; j < grid.n; ++j) {
      const int k2 = grid.wavenumber(j);
      if (k2 == -half) continue;
      if (k1 == 0 && k2 == 0) continue;
      const double r = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
      s.at_wavenumber(k1, k2) = std::pow(r, -s_exp);
    }
  }
  return from_spectral(s);
}

}  // namespace paracalc
