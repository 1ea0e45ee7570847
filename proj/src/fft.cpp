#include "paracalc/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace paracalc {
namespace {

// One cached plan pair per grid size. FFTW planning is not thread-safe, so
// creation is serialized; execution uses fftw_execute_dft with caller-owned
// fftw_malloc'd buffers, which is safe to run concurrently.
struct PlanPair {
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_registry() {
  static std::map<int, PlanPair> reg;
  return reg;
}

PlanPair plans_for(int n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& reg = plan_registry();
  auto it = reg.find(n);
  if (it != reg.end()) return it->second;
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n) * n);
  PlanPair p;
  p.fwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  p.bwd = fftw_plan_dft_2d(n, n, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_free(buf);
  reg[n] = p;
  return p;
}

struct FftwBuffer {
  fftw_complex* data = nullptr;
  explicit FftwBuffer(size_t count) { data = fftw_alloc_complex(count); }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

}  // namespace

SpectralField to_spectral(const Field& f) {
  const int n = f.grid.n;
  PlanPair p = plans_for(n);
  FftwBuffer buf(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) {
    buf.data[i][0] = f.v[i];
    buf.data[i][1] = 0.0;
  }
  fftw_execute_dft(p.fwd, buf.data, buf.data);
  SpectralField out(f.grid);
  const double scale = f.grid.cell_area();
  for (int i = 0; i < n * n; ++i) {
    out.c[i] = {buf.data[i][0] * scale, buf.data[i][1] * scale};
  }
  return out;
}

Field from_spectral(const SpectralField& s) {
  const int n = s.grid.n;
  PlanPair p = plans_for(n);
  FftwBuffer buf(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) {
    buf.data[i][0] = s.c[i].real();
    buf.data[i][1] = s.c[i].imag();
  }
  fftw_execute_dft(p.bwd, buf.data, buf.data);
  Field out(s.grid);
  const double scale = 1.0 / (two_pi * two_pi);
  for (int i = 0; i < n * n; ++i) out.v[i] = buf.data[i][0] * scale;
  return out;
}

void apply_multiplier(SpectralField& s, const std::function<double(int, int)>& m) {
  const int n = s.grid.n;
  for (int i = 0; i < n; ++i) {
    const int k1 = s.grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int k2 = s.grid.wavenumber(j);
      s.c[static_cast<size_t>(i) * n + j] *= m(k1, k2);
    }
  }
}

Field fourier_multiplier(const Field& f, const std::function<double(int, int)>& m) {
  SpectralField s = to_spectral(f);
  apply_multiplier(s, m);
  return from_spectral(s);
}

Field inv_laplacian(const Field& f) {
  SpectralField s = to_spectral(f);
  const double thresh = 1e-10 * two_pi * two_pi * std::max(1.0, f.sup_norm());
  if (std::abs(s.c[0]) > thresh) {
    throw std::invalid_argument("inv_laplacian: input has nonzero mean");
  }
  s.c[0] = 0.0;
  apply_multiplier(s, [](int k1, int k2) {
    const double k2n = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
    return k2n == 0.0 ? 0.0 : 1.0 / k2n;
  });
  return from_spectral(s);
}

Field heat_propagate(const Field& f, double eta, double t) {
  if (eta <= 0.0) throw std::invalid_argument("heat_propagate: eta must be positive");
  if (t < 0.0) throw std::invalid_argument("heat_propagate: negative time");
  return fourier_multiplier(f, [eta, t](int k1, int k2) {
    const double k2n = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
    return std::exp(-eta * k2n * t);
  });
}

namespace {
Field apply_ik(const Field& f, bool first_axis) {
  SpectralField s = to_spectral(f);
  const int n = s.grid.n;
  for (int i = 0; i < n; ++i) {
    const int k1 = s.grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int k2 = s.grid.wavenumber(j);
      const double k = first_axis ? k1 : k2;
      s.c[static_cast<size_t>(i) * n + j] *= std::complex<double>(0.0, k);
    }
  }
  zero_nyquist(s);
  return from_spectral(s);
}
}  // namespace

Field deriv_x1(const Field& f) { return apply_ik(f, true); }
Field deriv_x2(const Field& f) { return apply_ik(f, false); }

Field laplacian(const Field& f) {
  return fourier_multiplier(f, [](int k1, int k2) {
    return -(static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
  });
}

void zero_nyquist(SpectralField& s) {
  const int n = s.grid.n;
  const int ny = n / 2;
  for (int j = 0; j < n; ++j) {
    s.at(ny, j) = 0.0;
    s.at(j, ny) = 0.0;
  }
}

Field dealiased_product(const Field& a, const Field& b) {
  a.check_same(b);
  const int n = a.grid.n;
  const int m = 3 * n / 2;
  PlanPair pn = plans_for(n);
  PlanPair pm = plans_for(m);

  FftwBuffer fa(static_cast<size_t>(n) * n), fb(static_cast<size_t>(n) * n);
  for (int i = 0; i < n * n; ++i) {
    fa.data[i][0] = a.v[i];
    fa.data[i][1] = 0.0;
    fb.data[i][0] = b.v[i];
    fb.data[i][1] = 0.0;
  }
  fftw_execute_dft(pn.fwd, fa.data, fa.data);
  fftw_execute_dft(pn.fwd, fb.data, fb.data);

  // Scatter the n-grid coefficients into the padded m-grid, zero elsewhere.
  FftwBuffer ga(static_cast<size_t>(m) * m), gb(static_cast<size_t>(m) * m);
  for (size_t i = 0; i < static_cast<size_t>(m) * m; ++i) {
    ga.data[i][0] = ga.data[i][1] = 0.0;
    gb.data[i][0] = gb.data[i][1] = 0.0;
  }
  auto pad_index = [m, n](int idx) {
    const int k = idx < n / 2 ? idx : idx - n;
    return k >= 0 ? k : k + m;
  };
  for (int i = 0; i < n; ++i) {
    const size_t pi = static_cast<size_t>(pad_index(i));
    for (int j = 0; j < n; ++j) {
      const size_t pj = static_cast<size_t>(pad_index(j));
      const size_t src = static_cast<size_t>(i) * n + j;
      const size_t dst = pi * m + pj;
      ga.data[dst][0] = fa.data[src][0];
      ga.data[dst][1] = fa.data[src][1];
      gb.data[dst][0] = fb.data[src][0];
      gb.data[dst][1] = fb.data[src][1];
    }
  }
  fftw_execute_dft(pm.bwd, ga.data, ga.data);
  fftw_execute_dft(pm.bwd, gb.data, gb.data);

  // Physical product on the fine grid; forward transform; truncate.
  const double inv_nn = 1.0 / (static_cast<double>(n) * n);
  for (size_t i = 0; i < static_cast<size_t>(m) * m; ++i) {
    const double ar = ga.data[i][0] * inv_nn;
    const double br = gb.data[i][0] * inv_nn;
    ga.data[i][0] = ar * br;
    ga.data[i][1] = 0.0;
  }
  fftw_execute_dft(pm.fwd, ga.data, ga.data);

  SpectralField out(a.grid);
  const double scale = a.grid.cell_area() * static_cast<double>(n) * n /
                       (static_cast<double>(m) * m);
  for (int i = 0; i < n; ++i) {
    const size_t pi = static_cast<size_t>(pad_index(i));
    for (int j = 0; j < n; ++j) {
      const size_t pj = static_cast<size_t>(pad_index(j));
      const size_t src = pi * m + pj;
      out.c[static_cast<size_t>(i) * n + j] = {ga.data[src][0] * scale,
                                               ga.data[src][1] * scale};
    }
  }
  zero_nyquist(out);
  return from_spectral(out);
}

}  // namespace paracalc
