#pragma once

#include "paracalc/grid.hpp"

namespace paracalc {

/// Radial cutoff profile: chi(r) = 1 for r <= 1.1, 0 for r >= 1.4, and a
/// C-infinity monotone step in between built from q(u) = exp(-1/u).
[[nodiscard]] double chi_profile(double r);

/// Dyadic Littlewood-Paley partition on a grid.
///
/// rho_{-1}(k) = chi(|k|), rho_j(k) = chi(|k|/2^{j+1}) - chi(|k|/2^j) for
/// 0 <= j < J, and the top level is clamped, rho_J(k) = 1 - chi(|k|/2^J),
/// so that sum_j rho_j == 1 exactly on the whole lattice.  J is the largest
/// level with 2^J < n/2.
struct DyadicPartition {
  Grid grid;
  int J = 0;
  /// rho[j+1] is the multiplier table for level j, j = -1..J, size n*n.
  std::vector<std::vector<double>> rho;
  /// low[j] = sum_{i <= j-2} rho_i for j = 0..J+2 (low[0] = 0, low[1] = rho_{-1});
  /// the S_j smoothing multiplier.  low[J+2] == 1 everywhere.
  std::vector<std::vector<double>> low;

  [[nodiscard]] double rho_at(int j, int idx) const { return rho[j + 1][idx]; }
};

/// Cached partition for a grid (built once, shared).
const DyadicPartition& make_partition(const Grid& grid);

/// Block projection Delta_j f, j in [-1, J].
[[nodiscard]] Field lp_block(const Field& f, int j);

/// Low-frequency part S_j f = sum_{i < j-1} Delta_i f, j in [0, J+2];
/// S_j f == f for j >= J+2.  S_1 f = Delta_{-1} f.
[[nodiscard]] Field lp_low(const Field& f, int j);

/// Block projections applied in spectral space (no transform round trips).
void project_block(SpectralField& s, const DyadicPartition& part, int j);
void project_low(SpectralField& s, const DyadicPartition& part, int j);

}  // namespace paracalc
