#pragma once

#include <functional>

#include "paracalc/grid.hpp"

namespace paracalc {

/// Forward transform: fhat(k) = (2pi/n)^2 * sum_x f(x) exp(-i k.x).
/// Discrete realization of fhat(k) = integral f(x) exp(-i k.x) dx.
[[nodiscard]] SpectralField to_spectral(const Field& f);

/// Inverse transform: f(x) = (2pi)^{-2} * sum_k fhat(k) exp(i k.x).
/// Imaginary residue (from non-Hermitian input) is discarded; callers that
/// care assert Hermitian symmetry beforehand.
[[nodiscard]] Field from_spectral(const SpectralField& s);

/// Apply a real Fourier multiplier m(k1,k2) in place.
void apply_multiplier(SpectralField& s, const std::function<double(int, int)>& m);

/// f -> F^{-1}[ m(k) fhat(k) ] for a real multiplier.
[[nodiscard]] Field fourier_multiplier(const Field& f, const std::function<double(int, int)>& m);

/// Solve -Lap u = f for zero-mean f; errors when |fhat(0)| exceeds
/// 1e-10 * (2pi)^2 * max(1, ||f||_inf).
[[nodiscard]] Field inv_laplacian(const Field& f);

/// Heat propagator exp(eta * Lap * t): multiplier exp(-eta |k|^2 t).
/// Requires eta > 0 and t >= 0.
[[nodiscard]] Field heat_propagate(const Field& f, double eta, double t);

/// Partial derivatives and Laplacian via spectral multipliers.
[[nodiscard]] Field deriv_x1(const Field& f);
[[nodiscard]] Field deriv_x2(const Field& f);
[[nodiscard]] Field laplacian(const Field& f);

/// Exact product of the band-limited representatives via 3/2-rule zero
/// padding; the result is truncated back to the n-grid with Nyquist rows
/// zeroed (keeps the k -> -k symmetry honest).
[[nodiscard]] Field dealiased_product(const Field& a, const Field& b);

/// Zero the rows/columns at wavenumber -n/2 in place.
void zero_nyquist(SpectralField& s);

}  // namespace paracalc
