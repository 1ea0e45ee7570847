#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace paracalc {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Uniform n-by-n collocation grid on the 2-torus [0,2pi)^2.
/// n must be a power of two and at least 16 so that a dyadic
/// Littlewood-Paley partition with J >= 2 levels exists.
struct Grid {
  int n = 0;

  Grid() = default;
  explicit Grid(int n_) : n(n_) {
    if (n < 16) throw std::invalid_argument("Grid: n must be >= 16");
    if ((n & (n - 1)) != 0) throw std::invalid_argument("Grid: n must be a power of two");
  }

  [[nodiscard]] int size() const { return n * n; }
  [[nodiscard]] double x(int i) const { return two_pi * i / n; }
  [[nodiscard]] double cell_area() const { return (two_pi / n) * (two_pi / n); }

  /// Integer wavenumber for storage index i in [0,n): 0..n/2-1, then -n/2..-1.
  [[nodiscard]] int wavenumber(int i) const { return i < n / 2 ? i : i - n; }
  /// Storage index for integer wavenumber k in [-n/2, n/2).
  [[nodiscard]] int index_of(int k) const { return k >= 0 ? k : k + n; }

  friend bool operator==(const Grid& a, const Grid& b) { return a.n == b.n; }
  friend bool operator!=(const Grid& a, const Grid& b) { return a.n != b.n; }
};

/// Real scalar field sampled on a Grid, row-major: v[i*n + j] = f(x1_i, x2_j).
struct Field {
  Grid grid;
  std::vector<double> v;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), v(g.size(), fill) {}

  [[nodiscard]] double& at(int i, int j) { return v[static_cast<size_t>(i) * grid.n + j]; }
  [[nodiscard]] double at(int i, int j) const { return v[static_cast<size_t>(i) * grid.n + j]; }

  [[nodiscard]] double sup_norm() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  [[nodiscard]] double mean() const {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  Field& operator+=(const Field& o) {
    check_same(o);
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check_same(o);
    for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
  }
  Field& operator*=(double c) {
    for (double& x : v) x *= c;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double c) { return a *= c; }
  friend Field operator*(double c, Field a) { return a *= c; }

  void check_same(const Field& o) const {
    if (grid != o.grid) throw std::invalid_argument("Field: grid mismatch");
  }
};

/// Complex Fourier coefficients in DFT storage order, c[i*n + j] = fhat(k1(i), k2(j)),
/// with the continuum convention fhat(k) = integral of f(x) exp(-i k.x) dx.
struct SpectralField {
  Grid grid;
  std::vector<std::complex<double>> c;

  SpectralField() = default;
  explicit SpectralField(const Grid& g) : grid(g), c(g.size(), {0.0, 0.0}) {}

  [[nodiscard]] std::complex<double>& at(int i, int j) {
    return c[static_cast<size_t>(i) * grid.n + j];
  }
  [[nodiscard]] std::complex<double> at(int i, int j) const {
    return c[static_cast<size_t>(i) * grid.n + j];
  }

  /// Coefficient at integer wavenumber (k1,k2).
  [[nodiscard]] std::complex<double> at_wavenumber(int k1, int k2) const {
    return at(grid.index_of(k1), grid.index_of(k2));
  }
  [[nodiscard]] std::complex<double>& at_wavenumber(int k1, int k2) {
    return at(grid.index_of(k1), grid.index_of(k2));
  }
};

/// Pointwise application of a scalar function, f(x) -> fn(f(x)).
template <typename Fn>
[[nodiscard]] Field map_field(const Field& f, Fn&& fn) {
  Field out(f.grid);
  for (size_t i = 0; i < f.v.size(); ++i) out.v[i] = fn(f.v[i]);
  return out;
}

/// Pointwise product without dealiasing; prefer dealiased_product for spectral work.
[[nodiscard]] inline Field pointwise_product(const Field& a, const Field& b) {
  a.check_same(b);
  Field out(a.grid);
  for (size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

}  // namespace paracalc
