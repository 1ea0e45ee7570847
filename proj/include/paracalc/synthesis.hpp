#pragma once

#include <cstdint>

#include "paracalc/grid.hpp"

namespace paracalc {

/// Random-phase Hoelder field: fhat(k) = |k|^{-alpha-1} e^{i phi_k} with
/// Hermitian-paired phases, zero mean, zero Nyquist rows; block sup norms
/// scale like 2^{-j alpha} up to logs.  The field is rescaled so that
/// ||f||_inf == amplitude.
[[nodiscard]] Field synth_holder(const Grid& grid, double alpha, uint64_t seed,
                                 double amplitude = 1.0);

/// Deterministic radial synthesis fhat(k) = |k|^{-s} (all phases zero);
/// block sup norms scale like 2^{-j(s-2)} in 2D.
[[nodiscard]] Field synth_radial_power(const Grid& grid, double s);

/// Lacunary synthesis: one cosine per dyadic level, at wavenumber 1 for
/// level -1, 2 for level 0 and 3*2^{j-1} for level j >= 1 (each sits on the
/// flat part of its partition ring, so levels are exactly block-aligned),
/// with amplitude 2^{-alpha j}.  Axes alternate between x1 and x2 and the
/// phases are seeded; seed == 0 puts everything on x1 with zero phase, so
/// all levels peak at the origin.  Block sup norms are exactly 2^{-j alpha},
/// free of the log factors of the random-phase synthesis.
[[nodiscard]] Field synth_lacunary(const Grid& grid, double alpha, uint64_t seed);

}  // namespace paracalc
