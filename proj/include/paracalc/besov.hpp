#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "paracalc/grid.hpp"
#include "paracalc/param.hpp"
#include "paracalc/slab.hpp"

namespace paracalc {

/// Blockwise Hoelder-Besov data for one field at one exponent.
struct BesovReport {
  double alpha = 0.0;
  /// block_norms[j+1] = 2^{j alpha} ||Delta_j f||_inf for j = -1..J.
  std::vector<double> block_norms;
  /// sup over blocks of the weighted norms.
  double norm = 0.0;
  /// Least-squares slope of log2 ||Delta_j f||_inf (unweighted) against j,
  /// fitted over j = 1..J-1 restricted to blocks above the 1e-13 noise
  /// floor; reported only when at least 4 such blocks exist.
  bool has_slope = false;
  double fitted_slope = 0.0;
  double slope_residual = 0.0;
};

[[nodiscard]] BesovReport besov_norm(const Field& f, double alpha);

/// Parabolic norm: sup-over-frames Besov-alpha norm plus the alpha/2
/// Hoelder-in-time seminorm of the Besov-0 norm, sup over all frame pairs.
[[nodiscard]] double parabolic_norm(const TimeSlab& u, double alpha);

/// Bony decomposition: para_lt(f,g) + resonant(f,g) + para_gt(f,g)
/// reconstructs dealiased_product(f,g) (additively, to rounding).
[[nodiscard]] Field para_lt(const Field& f, const Field& g);   // f < g (low f, high g)
[[nodiscard]] Field para_gt(const Field& f, const Field& g);   // f > g = g < f
[[nodiscard]] Field resonant(const Field& f, const Field& g);  // f o g, |i-j| <= 1

/// C(f,g,h) = ((f < g) o h) - f (g o h), all products dealiased.
[[nodiscard]] Field commutator_C(const Field& f, const Field& g, const Field& h);

/// R_F(f) = F(f) - F'(f) < f with pointwise composition.
[[nodiscard]] Field paralin_remainder(const std::function<double(double)>& F,
                                      const std::function<double(double)>& dF, const Field& f);

/// Time-smoothed paraproduct (g << h)(t) = sum_j (Q_j *_t S_j g)(t) Delta_j h(t)
/// with the causal kernel taps of kernel_taps and past extension g(s) = g(0).
[[nodiscard]] TimeSlab time_smoothed_para(const TimeSlab& g, const TimeSlab& h);

struct RegularityFit {
  double alpha_hat = 0.0;
  double residual = 0.0;
  int blocks_used = 0;
};

/// alpha estimate from the block-norm regression; throws when fewer than 4
/// blocks in j = 1..J-1 sit above the noise floor.
[[nodiscard]] RegularityFit estimate_regularity(const Field& f);

/// sup over eta nodes and derivative orders n <= k of the inner norm of the
/// n-th eta-derivative.  Inner norm is the sup norm, or the Besov norm at
/// the given exponent when besov_alpha is set.  For slabs the inner norm is
/// taken as the sup over frames.
[[nodiscard]] double eta_sup_norm(const ParamField& h, int k,
                                  std::optional<double> besov_alpha = {});
[[nodiscard]] double eta_sup_norm(const ParamSlab& h, int k,
                                  std::optional<double> besov_alpha = {});

/// Least-squares line fit helper shared by the regression-style tests.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square misfit
};
[[nodiscard]] LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace paracalc
