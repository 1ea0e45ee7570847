#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "paracalc/grid.hpp"
#include "paracalc/slab.hpp"

namespace paracalc {

/// Chebyshev-Lobatto nodes on the diffusivity interval [lambda, 1].
/// Off-node evaluation uses barycentric interpolation, which for analytic
/// eta-dependence (such as 1/eta on [1/2, 1]) converges geometrically in M.
struct EtaGrid {
  double lambda = 0.5;
  int M = 0;
  std::vector<double> nodes;  // strictly increasing, nodes[0] = lambda, nodes[M-1] = 1

  EtaGrid() = default;
  EtaGrid(double lambda_, int M_);

  /// Barycentric weights w_i(eta) with sum 1; exact node hit gives a unit vector.
  [[nodiscard]] std::vector<double> interp_weights(double eta) const;

  /// Spectral differentiation matrix D, row-major M*M:
  /// (d/d eta f)(nodes[i]) ~= sum_j D[i*M+j] f(nodes[j]).
  [[nodiscard]] const std::vector<double>& diff_matrix() const;

  friend bool operator==(const EtaGrid& a, const EtaGrid& b) {
    return a.lambda == b.lambda && a.M == b.M;
  }
  friend bool operator!=(const EtaGrid& a, const EtaGrid& b) { return !(a == b); }

 private:
  std::vector<double> bary_;  // barycentric weights of the node set
  std::vector<double> diff_;  // differentiation matrix, built on construction
};

/// Closed-form eta-dependence tags.  Tagged fields are evaluated off-node
/// from the closed form (exact), untagged ones by interpolation.
enum class EtaForm {
  generic,         // interpolate across nodes
  inverse_eta,     // h(eta, x) = base(x) / eta
  inverse_eta_sq,  // h(eta, x) = base(x) / eta^2
};

/// Field-valued function of the diffusivity, stored at the eta nodes.
struct ParamField {
  EtaGrid eta;
  std::vector<Field> values;  // one Field per node, shared Grid
  EtaForm form = EtaForm::generic;

  ParamField() = default;
  ParamField(const EtaGrid& e, const Grid& g, EtaForm form_ = EtaForm::generic)
      : eta(e), values(e.M, Field(g)), form(form_) {}

  [[nodiscard]] const Grid& grid() const { return values.at(0).grid; }
  void check_consistent() const;

  /// Constant-in-eta wrapper around a single field.
  static ParamField eta_independent(const EtaGrid& e, const Field& f);
  /// h(eta, x) = base(x)/eta (tag inverse_eta).
  static ParamField over_eta(const EtaGrid& e, const Field& base);
  /// h(eta, x) = base(x)/eta^2 (tag inverse_eta_sq).
  static ParamField over_eta_sq(const EtaGrid& e, const Field& base);
};

/// TimeSlab-valued function of the diffusivity.
struct ParamSlab {
  EtaGrid eta;
  std::vector<TimeSlab> slabs;  // one aligned TimeSlab per node
  EtaForm form = EtaForm::generic;

  ParamSlab() = default;
  ParamSlab(const EtaGrid& e, const Grid& g, double t0, double dt, int frames,
            EtaForm form_ = EtaForm::generic)
      : eta(e), slabs(e.M, TimeSlab(g, t0, dt, frames)), form(form_) {}

  [[nodiscard]] const Grid& grid() const { return slabs.at(0).grid; }
  [[nodiscard]] int frame_count() const { return slabs.at(0).frame_count(); }
  void check_consistent() const;

  /// The eta-slice of frame m as a ParamField (same tag).
  [[nodiscard]] ParamField frame_slice(int m) const;

  static ParamSlab eta_independent(const EtaGrid& e, const TimeSlab& s);
};

/// h(eta_star, .) by tag dispatch: closed form when tagged, barycentric
/// interpolation otherwise.  eta_star must lie in [lambda, 1].
[[nodiscard]] Field eval_param(const ParamField& h, double eta_star);

/// Pointwise composition x -> h(m(x), x) for a spatially varying modulation
/// m with values in [lambda, 1].  range_tol bounds the allowed excursion
/// outside the interval; smoothed modulations (low-pass cuts of a bounded
/// field) overshoot slightly, so internal callers pass a wider tolerance
/// and the closed forms / barycentric formula extrapolate there.
[[nodiscard]] Field eval_field(const ParamField& h, const Field& m, double range_tol = 1e-9);

/// n-th eta-derivative (n <= 2) as a ParamField; exact closed forms for
/// tagged inputs, Chebyshev spectral differentiation otherwise.
[[nodiscard]] ParamField param_eta_derivative(const ParamField& h, int n);
[[nodiscard]] ParamSlab param_eta_derivative(const ParamSlab& h, int n);

/// Smooth bump on (0,1) with unit mass: Q(r) = c exp(-1/(r(1-r))),
/// c fixed once by fine quadrature.
struct TimeKernel {
  double c = 0.0;

  [[nodiscard]] double operator()(double r) const;
};

/// The kernel with its normalization constant (mass 1 to 1e-10).
[[nodiscard]] const TimeKernel& make_time_kernel();

/// Discrete taps of the block-j smoothing kernel Q_j(r) = 4^j Q(4^j r)
/// sampled at offsets m*dt (trapezoid quadrature), normalized so the taps
/// sum to exactly 1.  When the kernel support 4^{-j} falls below the grid
/// scale the taps collapse to the identity {1}.
[[nodiscard]] std::vector<double> kernel_taps(int j, double dt);

}  // namespace paracalc
