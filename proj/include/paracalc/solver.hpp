#pragma once

#include <cmath>
#include <vector>

#include "paracalc/grid.hpp"
#include "paracalc/noise.hpp"
#include "paracalc/param.hpp"
#include "paracalc/slab.hpp"

namespace paracalc {

/// Quasilinear diffusion coefficient with its first two derivatives and the
/// ellipticity floor.  The default family is a(v) = 3/4 + (1/4) sin v with
/// floor 1/2.  Callers supplying their own family keep a(v) inside
/// [lambda, 1] and the derivatives bounded by one; the solvers do not
/// re-check this beyond the degeneracy guard of counterterm_rhs and the
/// modulation-range checks of the paraproduct machinery.
struct DiffusionSpec {
  ScalarFn a = [](double v) { return 0.75 + 0.25 * std::sin(v); };
  ScalarFn da = [](double v) { return 0.25 * std::cos(v); };
  ScalarFn dda = [](double v) { return -0.25 * std::sin(v); };
  double lambda = 0.5;

  /// Constant-coefficient family a = c (derivatives zero).
  static DiffusionSpec constant(double c);
};

struct PicardConfig {
  int max_iterations = 25;
  double tolerance = 1e-6;
  /// Relaxation weight on the new iterate; 1 is undamped.
  double damping = 1.0;
};

/// Shared run parameters.  imex_split is the implicit coefficient of the
/// splitting; keep it within [max a / 2, max a] (the default 1 suits the
/// normalized families).  alpha is only echoed into reports.
struct SolverConfig {
  int n = 64;
  double T = 0.05;
  double dt = 5e-4;
  EtaGrid eta_grid{0.5, 6};
  double imex_split = 1.0;
  PicardConfig picard;
  double alpha = 0.9;
};

/// One fixed-point iterate: the trajectory u, the sharp remainder family
/// Usharp together with the forcing whose flow produced it (so the pairing
/// stays consistent when the forcing is reused one iteration later), the
/// modulated paraproduct of the current trajectory, and the per-iteration
/// residual history.  detector_mark is the index from which the
/// non-contraction detector inspects residuals; interventions advance it.
struct ParacontrolledState {
  TimeSlab u;
  ParamSlab Usharp;
  Field u0sharp;
  TimeSlab theta_slab;
  TimeSlab forcing;
  std::vector<double> residuals;
  int detector_mark = 0;
};

/// Implicit-explicit spectral stepping of
///   d_t u - a(u) Lap u = xi_eps + sigma a'(u) / a(u)^2:
/// each step solves (1 - dt lambda_bar Lap) u_{m+1} = u_m + dt [ (a(u_m) -
/// lambda_bar) Lap u_m + forcing(u_m) ] in Fourier space, with the
/// quasilinear product dealiased.  Frames are recorded every step.  Throws
/// runtime_error("... instability - reduce dt") when the sup norm passes
/// 1e6.
[[nodiscard]] TimeSlab solve_classical(const SolverConfig& cfg, const DiffusionSpec& spec,
                                       const Field& xi_eps, double sigma, const Field& u0);

/// Same stepping for d_t u - a1(u) Lap u = a2(u) xi_eps + counterterm,
/// with the bivariate counterterm of counterterm_rhs(a1, a2).  spec2 only
/// contributes its a and da members.  With a2 = 1 this is arithmetic for
/// arithmetic the path taken by solve_classical.
[[nodiscard]] TimeSlab solve_classical_rhs(const SolverConfig& cfg, const DiffusionSpec& spec1,
                                           const DiffusionSpec& spec2, const Field& xi_eps,
                                           double sigma, const Field& u0);

/// Sharp part of the initial condition: u0 minus the nonlinear paraproduct
/// of a(u0) against the time-independent family theta (at time zero the
/// time smoothing degenerates to the spatial paraproduct by the past
/// extension convention).
[[nodiscard]] Field usharp0(const Field& u0, const ParamField& theta, const DiffusionSpec& spec);

/// Right-hand side of the sharp-remainder flow for the current state:
///
///   F = a'(u) [Theta2 composed at a(u)] + Phi1(u) + Phi2(u)
///     + Psi(a(u), theta-family) + Psi(a(u), Usharp) + Psi(a(u), P u0sharp)
///
/// where Phi1 collects a(u) > Lap u, the commutator and paralinearization
/// remainders against Lap theta, the modulation commutator against the
/// theta-family, and the two Usharp couplings; Phi2 holds the same two
/// couplings with the heat flow of u0sharp, evaluated from the second frame
/// on and zero-extended at t = 0.  The Psi correctors receive closed-form
/// heat operators: xi_eps for the theta-family, zero for the heat flow, and
/// the lagged forcing stored in the state for Usharp.  The result does not
/// depend on eta and is returned broadcast across the nodes.  Updates
/// state.theta_slab as a side effect.
[[nodiscard]] ParamSlab build_F(ParacontrolledState& state, const EnhancedNoise& data,
                                const DiffusionSpec& spec, const Field& u0sharp);

/// One fixed-point sweep: integrates the forcing into a fresh sharp family
/// with zero initial data (exact per-mode exponential integrator per eta
/// node), rebuilds the trajectory from the three modulated paraproducts,
/// applies the damping of cfg.picard, and appends the sup distance between
/// successive trajectories to the residual history.  Throws
/// runtime_error("... reduce T") when the residuals after detector_mark
/// have been increasing across three iterations.
[[nodiscard]] ParacontrolledState gamma_step(const ParacontrolledState& state,
                                             const EnhancedNoise& data, const DiffusionSpec& spec,
                                             const SolverConfig& cfg);

/// Picard iteration of gamma_step from u(t) = u0, Usharp = 0.  On
/// non-contraction it first halves the damping, then halves the horizon (at
/// most three times, restarting fresh); when the iteration budget runs out
/// it throws runtime_error("... no contraction at this T").  Returns the
/// converged state with diagnostics.
[[nodiscard]] ParacontrolledState solve_paracontrolled(const SolverConfig& cfg,
                                                       const EnhancedNoise& data,
                                                       const DiffusionSpec& spec, const Field& u0);

/// The renormalized diffusion term of a converged state at one frame
/// (frame = -1 selects the last):
///
///   a(u) < Lap u + a'(u) [Theta2 composed at a(u)] + Phi1(u) + Phi2(u).
///
/// Subtracting it and xi_eps from d_t u leaves only scheme error.
[[nodiscard]] Field renormalized_product(const ParacontrolledState& state,
                                         const EnhancedNoise& data, const DiffusionSpec& spec,
                                         int frame = -1);

}  // namespace paracalc
