#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "paracalc/grid.hpp"
#include "paracalc/param.hpp"

namespace paracalc {

/// Radial spectral cutoff used to regularize rough driving fields.
/// The Fourier multiplier at wavenumber k is multiplier(eps * |k|);
/// both kinds satisfy 0 <= multiplier <= 1 and multiplier(0) = 1.
struct Mollifier {
  enum class Kind { gaussian, sharp };
  Kind kind = Kind::gaussian;

  /// Multiplier value at scaled radius r = eps * |k|:
  /// gaussian exp(-r^2/2), sharp indicator of r <= 1.
  [[nodiscard]] double multiplier(double r) const;
};

/// A mollified rough field bundled with its parametric antiderivative, the
/// renormalized resonant square, and the constant that renormalizes it.
struct EnhancedNoise {
  Field xi_eps;      // mollified sample, zero mean
  ParamField theta;  // theta(eta) = (-Lap)^{-1} xi_eps / eta, closed-form tag
  ParamField xi2;    // resonant(theta, Lap theta) minus its analytic mean
  double sigma = 0.0;
  double eps = 0.0;
  uint64_t seed = 0;
  Mollifier mollifier;
};

/// Zero-mean Gaussian white noise: Hermitian-paired independent complex
/// coefficients with E|xi_hat(k)|^2 = (2pi)^2 on every resolved mode, so
/// test integrals against L^2-normalized functions have unit variance.
/// Draws are keyed by (seed, k); the k = 0 coefficient and the unpaired
/// Nyquist rows are zeroed.
[[nodiscard]] Field sample_white_noise(const Grid& grid, uint64_t seed);

/// Coefficient-wise cutoff xi_hat(k) -> multiplier(eps |k|) xi_hat(k).
[[nodiscard]] Field mollify(const Field& xi, double eps, const Mollifier& m);

/// Stationary parametric solution theta(eta) = (-Lap)^{-1} xi / eta with
/// the 1/eta closed form recorded, so eta-derivatives are exact.
/// Requires a zero-mean input.
[[nodiscard]] ParamField make_vartheta(const Field& xi_eps, const EtaGrid& eta);

/// Renormalization constant: (2pi)^{-2} times the lattice sum of
/// multiplier(eps |k|)^2 / |k|^2 over resolved modes k != 0.  The
/// normalization makes E[resonant(theta(1), Lap theta(1))] = -sigma exactly
/// for fields built on the same grid and mollifier.  Terms are accumulated
/// from the largest radius inward with compensated summation, so the value
/// does not depend on enumeration order.
[[nodiscard]] double sigma_eps(const Mollifier& m, double eps, const Grid& grid);

/// Mean of the resonant square at diffusivity eta: -sigma / eta^2.
[[nodiscard]] double h_eps(double eta, double sigma);

/// Bundle a noise sample with theta and the renormalized resonant square
/// Xi2(eta) = resonant(theta(eta), Lap theta(eta)) + sigma/eta^2, with
/// sigma computed from the same lattice as the sample.
[[nodiscard]] EnhancedNoise enhanced_noise(const Field& xi, double eps, const Mollifier& m,
                                           const EtaGrid& eta, uint64_t seed);

/// Monte-Carlo mean and pointwise standard error of the unrenormalized
/// resonant square at one eta over `samples` independent draws, seeded from
/// (seed, sample index).  Requires samples >= 2.  Samples run in parallel;
/// the reduction is pairwise in sample order, so the result is bit-identical
/// for any worker count.
[[nodiscard]] std::pair<Field, Field> wick_mc_estimate(int samples, double eps, double eta,
                                                       const Grid& grid, const Mollifier& m,
                                                       uint64_t seed);

using ScalarFn = std::function<double(double)>;

/// Pointwise renormalization term for a diffusivity a1 and noise coefficient
/// a2: (a1'(u) a2(u)^2 / a1(u)^2 - a2'(u) a2(u) / a1(u)) * sigma.
/// Throws when a1(u) drops below lambda/2 anywhere.
[[nodiscard]] Field counterterm_rhs(const ScalarFn& a1, const ScalarFn& d_a1,
                                    const ScalarFn& a2, const ScalarFn& d_a2, const Field& u,
                                    double sigma, double lambda = 0.5);

using Kernel2 = std::function<double(double, double)>;

/// Mean correction for a noise family with covariance kernel F between
/// parameter values: (eta2'/eta1) dF1(eta2,eta2) sigma
/// - (eta1'/eta1^2) F(eta2,eta2) sigma, where dF1 is the partial of F in
/// its first slot.  Composed over ((a1(u),a2(u)), (a1'(u),a2'(u))) with
/// F(a,b) = a b this is the negative of counterterm_rhs.
[[nodiscard]] double h_eps_general(std::pair<double, double> eta,
                                   std::pair<double, double> eta_prime, const Kernel2& F,
                                   const Kernel2& dF1, double sigma);

/// One scalar weight plus the seed of its own white noise; a list of these
/// factorizes a covariance kernel F(a,b) = sum_i c_i(a) c_i(b).
struct NoiseFactor {
  ScalarFn weight;
  uint64_t seed = 0;
};

/// Parameter-dependent noise xi(eta, .) = sum_i c_i(eta) W_i with
/// independent white noises W_i.
[[nodiscard]] ParamField sample_param_noise(const std::vector<NoiseFactor>& factors,
                                            const EtaGrid& eta, const Grid& grid);

}  // namespace paracalc
