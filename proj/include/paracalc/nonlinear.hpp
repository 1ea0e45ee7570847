#pragma once

#include "paracalc/besov.hpp"
#include "paracalc/param.hpp"
#include "paracalc/slab.hpp"

namespace paracalc {

/// Nonlinear paraproducts of a modulation field g (values in [lambda, 1])
/// against a diffusivity-indexed family h.  Block j of the family is
/// composed with a smoothed version of g and the pieces tile the modulation
/// range exactly:
///
///   lt : block j composed at S_{max(j,1)} g
///   res: the difference between composition at S_{min(j+3, J+2)} g and at
///        S_{max(j,1)} g
///   gt : the difference between composition at g itself and at
///        S_{min(j+3, J+2)} g
///
/// so lt + res + gt telescopes blockwise to h(g(x), x) = nl_compose(g, h)
/// identically, and every operator collapses to h(gbar, .) for constant
/// modulation gbar.
[[nodiscard]] Field nl_para_lt(const Field& g, const ParamField& h);
[[nodiscard]] Field nl_para_res(const Field& g, const ParamField& h);
[[nodiscard]] Field nl_para_gt(const Field& g, const ParamField& h);

/// Pointwise composition x -> h(g(x), x).
[[nodiscard]] Field nl_compose(const Field& g, const ParamField& h);

/// Time-smoothed nonlinear paraproduct: block j of frame t is composed at
/// the causal time convolution Q_j * S_{max(j,1)} g, with the parabolic
/// kernel taps of kernel_taps and past extension g(s) = g(0).  The second
/// overload lets the family itself carry a time axis.
[[nodiscard]] TimeSlab nl_para_smoothed(const TimeSlab& g, const ParamField& h);
[[nodiscard]] TimeSlab nl_para_smoothed(const TimeSlab& g, const ParamSlab& h);

/// Lambda(g, h) = [A o (Lap A)] - compose(g, h o Lap h) with
/// A = nl_para_smoothed(g, h); the resonant products are spatial and the
/// family h o Lap h is built per eta node (with the closed form preserved
/// for tagged h).  Vanishes for constant g and for eta-independent h.
[[nodiscard]] TimeSlab nl_commutator_Lambda(const TimeSlab& g, const ParamField& h);

/// (L W)(eta, t) = d_t W(eta, t) - eta Lap W(eta, t), with the shared
/// second-order time stencil and the spectral Laplacian.  Needs >= 3 frames.
[[nodiscard]] ParamSlab apply_L(const ParamSlab& W);

/// The paradifferential heat operator along a modulation g:
/// (d_t w) - para_lt(g, Lap w), frame by frame, same time stencil.
[[nodiscard]] TimeSlab para_Lt_op(const TimeSlab& g, const TimeSlab& w);

/// psi(g, W, LW) = nl_para_smoothed(g, LW) - para_Lt_op(g, nl_para_smoothed(g, W)).
/// LW is supplied by the caller (closed forms where available) so that no
/// extra differencing noise enters.
[[nodiscard]] TimeSlab psi(const TimeSlab& g, const ParamSlab& W, const ParamSlab& LW);

/// Small-grid oracle for psi (n <= 16): evaluates the equivalent
/// commutator form
///
///   sum_j { -m_j . (K_j Lap W)(m_j) - (K_j d_eta W)(m_j) . d_t m_j }
///      + para_lt-assembled g < Lap(sum_j (K_j W)(m_j))
///
/// with every block and low-pass projection realized as an explicit
/// real-space convolution array, the kernel taps re-derived from raw
/// trapezoid sums, and d_t m_j formed from the analytic kernel derivative.
/// Cost O(n^4) per frame; throws for n > 16.
[[nodiscard]] TimeSlab psi_kernel_reference(const TimeSlab& g, const ParamSlab& W);

/// A diffusivity-indexed slab together with its first two eta-derivatives.
struct ParamFlow {
  ParamSlab value;
  ParamSlab d_eta;
  ParamSlab d_eta2;
};

/// U_f(eta, t) = int_0^t e^{eta Lap (t-s)} f(s) ds via the per-mode exact
/// exponential integrator for f held constant on each step; the
/// eta-derivatives follow the exact differentiated recursion.
[[nodiscard]] ParamFlow parametric_duhamel(const TimeSlab& f, const EtaGrid& eg);

/// e^{eta Lap t} u0 on a uniform frame grid with exact per-mode
/// eta-derivative factors (-|k|^2 t and |k|^4 t^2).
[[nodiscard]] ParamFlow parametric_heat(const Field& u0, const EtaGrid& eg, double t0, double dt,
                                        int frames);

}  // namespace paracalc
