#include "paracalc/partition.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "paracalc/fft.hpp"

namespace paracalc {

double chi_profile(double r) {
  r = std::abs(r);
  if (r <= 1.1) return 1.0;
  if (r >= 1.4) return 0.0;
  // Smooth step s on (0,1) with s(0)=0, s(1)=1; chi falls from 1 to 0.
  const double u = (1.4 - r) / 0.3;
  auto q = [](double t) { return t <= 0.0 ? 0.0 : std::exp(-1.0 / t); };
  const double qa = q(u);
  const double qb = q(1.0 - u);
  return qa / (qa + qb);
}

namespace {

std::mutex g_part_mutex;

std::unique_ptr<DyadicPartition> build_partition(const Grid& grid) {
  auto part = std::make_unique<DyadicPartition>();
  part->grid = grid;
  int J = 0;
  while ((1 << (J + 1)) < grid.n / 2) ++J;
  if (J < 2) throw std::invalid_argument("make_partition: grid too small for J >= 2");
  part->J = J;

  const int n = grid.n;
  part->rho.assign(J + 2, std::vector<double>(grid.size(), 0.0));
  for (int i = 0; i < n; ++i) {
    const double k1 = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const double k2 = grid.wavenumber(j);
      const double r = std::sqrt(k1 * k1 + k2 * k2);
      const size_t idx = static_cast<size_t>(i) * n + j;
      double acc = 0.0;  // running sum of levels below, for exact telescoping
      double prev = chi_profile(r);
      part->rho[0][idx] = prev;
      acc = prev;
      for (int lev = 0; lev < J; ++lev) {
        const double cur = chi_profile(r / std::pow(2.0, lev + 1));
        const double val = cur - chi_profile(r / std::pow(2.0, lev));
        part->rho[lev + 1][idx] = val;
        acc += val;
      }
      part->rho[J + 1][idx] = 1.0 - acc;  // clamped top level
    }
  }

  part->low.assign(J + 3, std::vector<double>(grid.size(), 0.0));
  for (int j = 1; j <= J + 2; ++j) {
    for (int idx = 0; idx < grid.size(); ++idx) {
      part->low[j][idx] = part->low[j - 1][idx] + part->rho[j - 1][idx];
    }
  }
  return part;
}

std::map<int, std::unique_ptr<DyadicPartition>>& partition_registry() {
  static std::map<int, std::unique_ptr<DyadicPartition>> reg;
  return reg;
}

}  // namespace

const DyadicPartition& make_partition(const Grid& grid) {
  std::lock_guard<std::mutex> lock(g_part_mutex);
  auto& reg = partition_registry();
  auto it = reg.find(grid.n);
  if (it == reg.end()) {
    it = reg.emplace(grid.n, build_partition(grid)).first;
  }
  return *it->second;
}

void project_block(SpectralField& s, const DyadicPartition& part, int j) {
  if (j < -1 || j > part.J) throw std::invalid_argument("project_block: level out of range");
  const auto& tab = part.rho[j + 1];
  for (int idx = 0; idx < part.grid.size(); ++idx) s.c[idx] *= tab[idx];
}

void project_low(SpectralField& s, const DyadicPartition& part, int j) {
  if (j < 0) throw std::invalid_argument("project_low: level out of range");
  if (j > part.J + 2) j = part.J + 2;
  const auto& tab = part.low[j];
  for (int idx = 0; idx < part.grid.size(); ++idx) s.c[idx] *= tab[idx];
}

Field lp_block(const Field& f, int j) {
  const DyadicPartition& part = make_partition(f.grid);
  SpectralField s = to_spectral(f);
  project_block(s, part, j);
  return from_spectral(s);
}

Field lp_low(const Field& f, int j) {
  const DyadicPartition& part = make_partition(f.grid);
  SpectralField s = to_spectral(f);
  project_low(s, part, j);
  return from_spectral(s);
}

}  // namespace paracalc
