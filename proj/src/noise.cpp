#include "paracalc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "paracalc/besov.hpp"
#include "paracalc/fft.hpp"
#include "paracalc/parallel.hpp"
#include "paracalc/rng.hpp"

namespace paracalc {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

uint64_t mode_key(int k) { return static_cast<uint64_t>(static_cast<int64_t>(k)); }

// Pairwise sum / sum-of-squares over draws[lo, hi), fixed association.
void pairwise_moments(const std::vector<Field>& draws, int lo, int hi, Field& sum, Field& sumsq) {
  if (hi - lo == 1) {
    sum = draws[lo];
    sumsq = pointwise_product(draws[lo], draws[lo]);
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  Field rs, rq;
  pairwise_moments(draws, lo, mid, sum, sumsq);
  pairwise_moments(draws, mid, hi, rs, rq);
  sum += rs;
  sumsq += rq;
}

}  // namespace

double Mollifier::multiplier(double r) const {
  switch (kind) {
    case Kind::gaussian:
      return std::exp(-0.5 * r * r);
    case Kind::sharp:
      return r <= 1.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

Field sample_white_noise(const Grid& grid, uint64_t seed) {
  const int n = grid.n;
  SpectralField s(grid);
  for (int i = 0; i < n; ++i) {
    const int k1 = grid.wavenumber(i);
    if (k1 == -n / 2) continue;
    for (int j = 0; j < n; ++j) {
      const int k2 = grid.wavenumber(j);
      if (k2 == -n / 2) continue;
      if (k1 == 0 && k2 == 0) continue;
      const bool canonical = k1 > 0 || (k1 == 0 && k2 > 0);
      if (!canonical) continue;
      const auto [a, b] = rng::normal_pair(seed, mode_key(k1), mode_key(k2), 0);
      const std::complex<double> c(a * kSqrtHalf, b * kSqrtHalf);
      s.at(i, j) = two_pi * c;
      s.at_wavenumber(-k1, -k2) = two_pi * std::conj(c);
    }
  }
  return from_spectral(s);
}

Field mollify(const Field& xi, double eps, const Mollifier& m) {
  if (eps <= 0.0) throw std::invalid_argument("mollify: eps must be positive");
  return fourier_multiplier(xi, [eps, &m](int k1, int k2) {
    const double kk = std::sqrt(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
    return m.multiplier(eps * kk);
  });
}

ParamField make_vartheta(const Field& xi_eps, const EtaGrid& eta) {
  // inv_laplacian rejects fields with a nonzero mean mode.
  return ParamField::over_eta(eta, inv_laplacian(xi_eps));
}

double sigma_eps(const Mollifier& m, double eps, const Grid& grid) {
  if (eps <= 0.0) throw std::invalid_argument("sigma_eps: eps must be positive");
  const int half = grid.n / 2;
  std::vector<std::pair<int64_t, double>> terms;
  terms.reserve(static_cast<size_t>(grid.n) * grid.n);
  for (int k1 = -(half - 1); k1 <= half - 1; ++k1) {
    for (int k2 = -(half - 1); k2 <= half - 1; ++k2) {
      const int64_t ksq = static_cast<int64_t>(k1) * k1 + static_cast<int64_t>(k2) * k2;
      if (ksq == 0) continue;
      const double psi = m.multiplier(eps * std::sqrt(static_cast<double>(ksq)));
      if (psi == 0.0) continue;
      terms.emplace_back(ksq, psi * psi / static_cast<double>(ksq));
    }
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  double sum = 0.0, carry = 0.0;
  for (const auto& [ksq, t] : terms) {
    const double y = t - carry;
    const double next = sum + y;
    carry = (next - sum) - y;
    sum = next;
  }
  return sum / (two_pi * two_pi);
}

double h_eps(double eta, double sigma) {
  if (eta <= 0.0) throw std::invalid_argument("h_eps: eta must be positive");
  return -sigma / (eta * eta);
}

EnhancedNoise enhanced_noise(const Field& xi, double eps, const Mollifier& m, const EtaGrid& eta,
                             uint64_t seed) {
  EnhancedNoise out;
  out.eps = eps;
  out.seed = seed;
  out.mollifier = m;
  out.xi_eps = mollify(xi, eps, m);
  out.sigma = sigma_eps(m, eps, xi.grid);
  out.theta = make_vartheta(out.xi_eps, eta);
  const Field v = inv_laplacian(out.xi_eps);
  Field base = resonant(v, laplacian(v));
  for (double& x : base.v) x += out.sigma;
  out.xi2 = ParamField::over_eta_sq(eta, base);
  return out;
}

std::pair<Field, Field> wick_mc_estimate(int samples, double eps, double eta, const Grid& grid,
                                         const Mollifier& m, uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("wick_mc_estimate: need at least two samples");
  if (eta <= 0.0) throw std::invalid_argument("wick_mc_estimate: eta must be positive");
  std::vector<Field> draws(static_cast<size_t>(samples));
  parallel_for(samples, [&](int s) {
    const Field xi = sample_white_noise(grid, rng::derive_seed(seed, static_cast<uint64_t>(s)));
    const Field v = inv_laplacian(mollify(xi, eps, m));
    Field r = resonant(v, laplacian(v));
    r *= 1.0 / (eta * eta);
    draws[static_cast<size_t>(s)] = std::move(r);
  });
  Field sum, sumsq;
  pairwise_moments(draws, 0, samples, sum, sumsq);
  const double inv_m = 1.0 / samples;
  Field mean = sum * inv_m;
  Field stderr_field(grid);
  for (size_t i = 0; i < stderr_field.v.size(); ++i) {
    const double var = (sumsq.v[i] - sum.v[i] * sum.v[i] * inv_m) / (samples - 1);
    stderr_field.v[i] = std::sqrt(std::max(var, 0.0) * inv_m);
  }
  return {std::move(mean), std::move(stderr_field)};
}

Field counterterm_rhs(const ScalarFn& a1, const ScalarFn& d_a1, const ScalarFn& a2,
                      const ScalarFn& d_a2, const Field& u, double sigma, double lambda) {
  Field out(u.grid);
  for (size_t i = 0; i < u.v.size(); ++i) {
    const double c1 = a1(u.v[i]);
    if (c1 < 0.5 * lambda)
      throw std::invalid_argument("counterterm_rhs: diffusion coefficient degenerate");
    const double c2 = a2(u.v[i]);
    out.v[i] = (d_a1(u.v[i]) * c2 * c2 / (c1 * c1) - d_a2(u.v[i]) * c2 / c1) * sigma;
  }
  return out;
}

double h_eps_general(std::pair<double, double> eta, std::pair<double, double> eta_prime,
                     const Kernel2& F, const Kernel2& dF1, double sigma) {
  const auto [e1, e2] = eta;
  const auto [d1, d2] = eta_prime;
  if (e1 <= 0.0) throw std::invalid_argument("h_eps_general: eta1 must be positive");
  return (d2 / e1) * dF1(e2, e2) * sigma - (d1 / (e1 * e1)) * F(e2, e2) * sigma;
}

ParamField sample_param_noise(const std::vector<NoiseFactor>& factors, const EtaGrid& eta,
                              const Grid& grid) {
  ParamField out(eta, grid, EtaForm::generic);
  for (const NoiseFactor& f : factors) {
    const Field w = sample_white_noise(grid, f.seed);
    for (int i = 0; i < eta.M; ++i) {
      out.values[static_cast<size_t>(i)] += f.weight(eta.nodes[static_cast<size_t>(i)]) * w;
    }
  }
  return out;
}

}  // namespace paracalc
