#include "paracalc/nonlinear.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "paracalc/fft.hpp"
#include "paracalc/partition.hpp"

namespace paracalc {

namespace {

// Smoothed modulations overshoot [lambda, 1] by Fourier truncation; the
// closed forms and the barycentric formula extrapolate fine over small
// excursions, so internal compositions allow this much.
constexpr double kSmoothedRangeTol = 0.2;

void check_modulation(const Field& g, const EtaGrid& e) {
  for (double v : g.v) {
    if (v < e.lambda - 1e-9 || v > 1.0 + 1e-9)
      throw std::invalid_argument("modulation field leaves [lambda, 1]");
  }
}

// blocks[j+1] = Delta_j h per eta node; projection is linear so the
// closed-form tag survives.
std::vector<ParamField> param_blocks(const ParamField& h) {
  const DyadicPartition& part = make_partition(h.grid());
  std::vector<ParamField> out;
  out.reserve(part.J + 2);
  for (int j = -1; j <= part.J; ++j) out.emplace_back(h.eta, h.grid(), h.form);
  for (int node = 0; node < h.eta.M; ++node) {
    const SpectralField s = to_spectral(h.values[node]);
    for (int j = -1; j <= part.J; ++j) {
      SpectralField b = s;
      project_block(b, part, j);
      out[j + 1].values[node] = from_spectral(b);
    }
  }
  return out;
}

// lows[j] = S_j g for j = 1..J+2 (lows[0] unused); lows[J+2] == g.
std::vector<Field> low_family(const Field& g) {
  const DyadicPartition& part = make_partition(g.grid);
  const SpectralField s = to_spectral(g);
  std::vector<Field> lows(part.J + 3, Field(g.grid));
  for (int j = 1; j <= part.J + 2; ++j) {
    SpectralField t = s;
    project_low(t, part, j);
    lows[j] = from_spectral(t);
  }
  return lows;
}

int upper_index(int j, int J) { return std::min(j + 3, J + 2); }
int lower_index(int j) { return std::max(j, 1); }

}  // namespace

Field nl_para_lt(const Field& g, const ParamField& h) {
  g.check_same(h.values[0]);
  check_modulation(g, h.eta);
  const int J = make_partition(g.grid).J;
  const std::vector<ParamField> hb = param_blocks(h);
  const std::vector<Field> lows = low_family(g);
  Field acc(g.grid);
  for (int j = -1; j <= J; ++j)
    acc += eval_field(hb[j + 1], lows[lower_index(j)], kSmoothedRangeTol);
  return acc;
}

Field nl_para_res(const Field& g, const ParamField& h) {
  g.check_same(h.values[0]);
  check_modulation(g, h.eta);
  const int J = make_partition(g.grid).J;
  const std::vector<ParamField> hb = param_blocks(h);
  const std::vector<Field> lows = low_family(g);
  Field acc(g.grid);
  for (int j = -1; j <= J; ++j) {
    acc += eval_field(hb[j + 1], lows[upper_index(j, J)], kSmoothedRangeTol);
    acc -= eval_field(hb[j + 1], lows[lower_index(j)], kSmoothedRangeTol);
  }
  return acc;
}

Field nl_para_gt(const Field& g, const ParamField& h) {
  g.check_same(h.values[0]);
  check_modulation(g, h.eta);
  const int J = make_partition(g.grid).J;
  const std::vector<ParamField> hb = param_blocks(h);
  const std::vector<Field> lows = low_family(g);
  Field acc(g.grid);
  for (int j = -1; j <= J; ++j) {
    acc += eval_field(hb[j + 1], g);
    acc -= eval_field(hb[j + 1], lows[upper_index(j, J)], kSmoothedRangeTol);
  }
  return acc;
}

Field nl_compose(const Field& g, const ParamField& h) { return eval_field(h, g); }

namespace {

TimeSlab smoothed_core(const TimeSlab& g, const std::function<ParamField(int)>& slice_at,
                       bool static_family) {
  const Grid& grid = g.grid;
  const DyadicPartition& part = make_partition(grid);
  const int J = part.J;
  const int F = g.frame_count();

  std::vector<SpectralField> sg;
  sg.reserve(F);
  for (const Field& fr : g.frames) sg.push_back(to_spectral(fr));

  struct BlockPlan {
    std::vector<double> taps;
    std::vector<int> support;
    int low_idx = 1;
  };
  std::vector<BlockPlan> plans(J + 2);
  for (int j = -1; j <= J; ++j) {
    BlockPlan& bp = plans[j + 1];
    bp.taps = kernel_taps(j, g.dt);
    bp.low_idx = lower_index(j);
    const std::vector<double>& low = part.low[bp.low_idx];
    for (int idx = 0; idx < grid.size(); ++idx)
      if (low[idx] != 0.0) bp.support.push_back(idx);
  }

  std::vector<ParamField> static_blocks;
  if (static_family) static_blocks = param_blocks(slice_at(0));

  TimeSlab out(grid, g.t0, g.dt, F);
  for (int t = 0; t < F; ++t) {
    std::vector<ParamField> scratch;
    if (!static_family) scratch = param_blocks(slice_at(t));
    const std::vector<ParamField>& hb = static_family ? static_blocks : scratch;
    for (int j = -1; j <= J; ++j) {
      const BlockPlan& bp = plans[j + 1];
      const std::vector<double>& low = part.low[bp.low_idx];
      SpectralField conv(grid);
      double tail = 0.0;  // taps that clamp to frame 0 collapse into one weight
      for (size_t m = 0; m < bp.taps.size(); ++m) {
        const int src = t - static_cast<int>(m);
        if (src < 0) {
          tail += bp.taps[m];
          continue;
        }
        const double w = bp.taps[m];
        if (w == 0.0) continue;
        const SpectralField& sfr = sg[static_cast<size_t>(src)];
        for (int idx : bp.support) conv.c[idx] += w * low[idx] * sfr.c[idx];
      }
      if (tail != 0.0)
        for (int idx : bp.support) conv.c[idx] += tail * low[idx] * sg[0].c[idx];
      out.frames[t] += eval_field(hb[j + 1], from_spectral(conv), kSmoothedRangeTol);
    }
  }
  return out;
}

}  // namespace

TimeSlab nl_para_smoothed(const TimeSlab& g, const ParamField& h) {
  g.frames.at(0).check_same(h.values.at(0));
  for (const Field& fr : g.frames) check_modulation(fr, h.eta);
  return smoothed_core(
      g, [&](int) { return h; }, true);
}

TimeSlab nl_para_smoothed(const TimeSlab& g, const ParamSlab& h) {
  g.check_aligned(h.slabs.at(0));
  for (const Field& fr : g.frames) check_modulation(fr, h.eta);
  return smoothed_core(
      g, [&](int t) { return h.frame_slice(t); }, false);
}

TimeSlab nl_commutator_Lambda(const TimeSlab& g, const ParamField& h) {
  const int F = g.frame_count();
  const TimeSlab A = nl_para_smoothed(g, h);

  ParamField hdh(h.eta, h.grid());
  if (h.form == EtaForm::inverse_eta) {
    const Field base = h.values[0] * h.eta.nodes[0];
    hdh = ParamField::over_eta_sq(h.eta, resonant(base, laplacian(base)));
  } else {
    for (int i = 0; i < h.eta.M; ++i)
      hdh.values[i] = resonant(h.values[i], laplacian(h.values[i]));
  }

  TimeSlab out(g.grid, g.t0, g.dt, F);
  for (int t = 0; t < F; ++t) {
    out.frames[t] = resonant(A.frames[t], laplacian(A.frames[t]));
    out.frames[t] -= eval_field(hdh, g.frames[t], kSmoothedRangeTol);
  }
  return out;
}

ParamSlab apply_L(const ParamSlab& W) {
  const int F = W.frame_count();
  ParamSlab out(W.eta, W.grid(), W.slabs[0].t0, W.slabs[0].dt, F);
  for (int i = 0; i < W.eta.M; ++i) {
    const double eta = W.eta.nodes[i];
    out.slabs[i] = time_derivative(W.slabs[i]);
    for (int t = 0; t < F; ++t) out.slabs[i].frames[t] -= eta * laplacian(W.slabs[i].frames[t]);
  }
  return out;
}

TimeSlab para_Lt_op(const TimeSlab& g, const TimeSlab& w) {
  g.check_aligned(w);
  TimeSlab out = time_derivative(w);
  for (int t = 0; t < w.frame_count(); ++t)
    out.frames[t] -= para_lt(g.frames[t], laplacian(w.frames[t]));
  return out;
}

TimeSlab psi(const TimeSlab& g, const ParamSlab& W, const ParamSlab& LW) {
  TimeSlab a = nl_para_smoothed(g, LW);
  const TimeSlab b = para_Lt_op(g, nl_para_smoothed(g, W));
  for (int t = 0; t < a.frame_count(); ++t) a.frames[t] -= b.frames[t];
  return a;
}

namespace {

// Real-space convolution array of a spectral multiplier table:
// K(d) = (2pi)^{-2} cell * sum_k mult(k) cos(k . d).
std::vector<double> kernel_array(const Grid& grid, const std::vector<double>& mult) {
  const int n = grid.n;
  std::vector<double> K(grid.size(), 0.0);
  for (int di = 0; di < n; ++di) {
    for (int dj = 0; dj < n; ++dj) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const int k1 = grid.wavenumber(i);
        for (int j = 0; j < n; ++j) {
          const double m = mult[static_cast<size_t>(i) * n + j];
          if (m == 0.0) continue;
          const int k2 = grid.wavenumber(j);
          acc += m * std::cos(k1 * grid.x(di) + k2 * grid.x(dj));
        }
      }
      K[static_cast<size_t>(di) * n + dj] = acc * grid.cell_area() / (two_pi * two_pi);
    }
  }
  return K;
}

Field convolve_array(const std::vector<double>& K, const Field& f) {
  const int n = f.grid.n;
  Field out(f.grid);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a) {
        const int di = (i - a + n) % n;
        for (int b = 0; b < n; ++b) {
          const int dj = (j - b + n) % n;
          acc += K[static_cast<size_t>(di) * n + dj] * f.at(a, b);
        }
      }
      out.at(i, j) = acc;
    }
  }
  return out;
}

ParamField convolve_param(const std::vector<double>& K, const ParamField& h) {
  ParamField out(h.eta, h.grid(), h.form);
  for (int i = 0; i < h.eta.M; ++i) out.values[i] = convolve_array(K, h.values[i]);
  return out;
}

double kernel_derivative(double r) {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  const double p = r * (1.0 - r);
  return make_time_kernel()(r) * (1.0 - 2.0 * r) / (p * p);
}

// Raw trapezoid taps of Q_j (deriv = false) or of its time derivative
// (deriv = true); no renormalization, so this path is independent of
// kernel_taps up to the quadrature error of the bump.
std::vector<double> raw_taps(int j, double dt, bool deriv) {
  const TimeKernel& Q = make_time_kernel();
  const double scale = std::pow(4.0, j);
  const int taps = static_cast<int>(std::floor(1.0 / (scale * dt))) + 1;
  if (taps < 24)
    throw std::invalid_argument("psi_kernel_reference: time step too coarse for the kernel taps");
  std::vector<double> w(static_cast<size_t>(taps) + 1, 0.0);
  for (size_t m = 0; m < w.size(); ++m) {
    const double endpoint = (m == 0 || m + 1 == w.size()) ? 0.5 : 1.0;
    const double r = scale * m * dt;
    w[m] = endpoint * dt * (deriv ? scale * scale * kernel_derivative(r) : scale * Q(r));
  }
  return w;
}

Field tap_combination(const std::vector<double>& taps, const std::vector<Field>& frames, int t) {
  Field acc(frames[0].grid);
  double tail = 0.0;
  for (size_t m = 0; m < taps.size(); ++m) {
    const int src = t - static_cast<int>(m);
    if (src < 0) {
      tail += taps[m];
      continue;
    }
    if (taps[m] != 0.0) acc += taps[m] * frames[static_cast<size_t>(src)];
  }
  if (tail != 0.0) acc += tail * frames[0];
  return acc;
}

}  // namespace

TimeSlab psi_kernel_reference(const TimeSlab& g, const ParamSlab& W) {
  const Grid& grid = g.grid;
  if (grid.n > 16)
    throw std::invalid_argument("psi_kernel_reference: grid too large for the kernel oracle");
  g.check_aligned(W.slabs.at(0));
  const DyadicPartition& part = make_partition(grid);
  const int J = part.J;
  const int F = g.frame_count();

  std::vector<std::vector<double>> block_arr(J + 2);
  for (int j = -1; j <= J; ++j) block_arr[j + 1] = kernel_array(grid, part.rho[j + 1]);
  std::vector<std::vector<double>> low_arr(J + 1);  // index 1..J
  for (int q = 1; q <= J; ++q) low_arr[q] = kernel_array(grid, part.low[q]);

  // Low-passed modulation frames Sg[q][t] by array convolution.
  std::vector<std::vector<Field>> Sg(J + 1);
  for (int q = 1; q <= J; ++q) {
    Sg[q].reserve(F);
    for (int t = 0; t < F; ++t) Sg[q].push_back(convolve_array(low_arr[q], g.frames[t]));
  }

  std::vector<std::vector<double>> qtaps(J + 2), dqtaps(J + 2);
  for (int j = -1; j <= J; ++j) {
    qtaps[j + 1] = raw_taps(j, g.dt, false);
    dqtaps[j + 1] = raw_taps(j, g.dt, true);
  }

  TimeSlab out(grid, g.t0, g.dt, F);
  for (int t = 0; t < F; ++t) {
    const ParamField Wt = W.frame_slice(t);
    const ParamField dWt = param_eta_derivative(Wt, 1);
    ParamField lapWt(Wt.eta, grid, Wt.form);
    for (int i = 0; i < Wt.eta.M; ++i) lapWt.values[i] = laplacian(Wt.values[i]);

    Field acc(grid);
    Field a_sum(grid);
    for (int j = -1; j <= J; ++j) {
      const int q = lower_index(j);
      const Field m_j = tap_combination(qtaps[j + 1], Sg[q], t);
      const Field dm_j = tap_combination(dqtaps[j + 1], Sg[q], t);

      const ParamField KW = convolve_param(block_arr[j + 1], Wt);
      const ParamField KdW = convolve_param(block_arr[j + 1], dWt);
      const ParamField KlapW = convolve_param(block_arr[j + 1], lapWt);

      a_sum += eval_field(KW, m_j, kSmoothedRangeTol);
      acc -= pointwise_product(m_j, eval_field(KlapW, m_j, kSmoothedRangeTol));
      acc -= pointwise_product(eval_field(KdW, m_j, kSmoothedRangeTol), dm_j);
    }
    const Field lap_a = laplacian(a_sum);
    for (int q = 1; q <= J; ++q)
      acc += dealiased_product(Sg[q][t], convolve_array(block_arr[q + 1], lap_a));
    out.frames[t] = acc;
  }
  return out;
}

namespace {

// phi1(z) = (e^z - 1)/z and its first two derivatives, series-stabilized
// near zero.
void phi_factors(double z, double& p1, double& p1p, double& p1pp) {
  if (std::abs(z) < 0.125) {
    p1 = 0.0;
    p1p = 0.0;
    p1pp = 0.0;
    double fact = 1.0;  // (r+1)! running
    double zr = 1.0;
    for (int r = 0; r <= 12; ++r) {
      fact *= (r + 1);
      const double f2 = fact * (r + 2);
      const double f3 = f2 * (r + 3);
      p1 += zr / fact;
      p1p += (r + 1) * zr / f2;
      p1pp += static_cast<double>(r + 1) * (r + 2) * zr / f3;
      zr *= z;
    }
    return;
  }
  const double ez = std::exp(z);
  p1 = (ez - 1.0) / z;
  p1p = (ez * (z - 1.0) + 1.0) / (z * z);
  p1pp = (ez * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z);
}

}  // namespace

ParamFlow parametric_duhamel(const TimeSlab& f, const EtaGrid& eg) {
  const Grid& grid = f.grid;
  const int n = grid.n;
  const int F = f.frame_count();
  const double dt = f.dt;

  std::vector<SpectralField> sf;
  sf.reserve(F);
  for (const Field& fr : f.frames) sf.push_back(to_spectral(fr));

  std::vector<int> ksq_of(grid.size());
  int ksq_max = 0;
  for (int i = 0; i < n; ++i) {
    const int k1 = grid.wavenumber(i);
    for (int j = 0; j < n; ++j) {
      const int k2 = grid.wavenumber(j);
      const int ksq = k1 * k1 + k2 * k2;
      ksq_of[static_cast<size_t>(i) * n + j] = ksq;
      ksq_max = std::max(ksq_max, ksq);
    }
  }

  ParamFlow out{ParamSlab(eg, grid, f.t0, dt, F), ParamSlab(eg, grid, f.t0, dt, F),
                ParamSlab(eg, grid, f.t0, dt, F)};

  for (int node = 0; node < eg.M; ++node) {
    const double eta = eg.nodes[node];
    // Per-|k|^2 step factors: ez, dt*phi1, w*ez, dt*w*phi1', w^2*ez,
    // dt*w^2*phi1'' with w = dz/deta = -|k|^2 dt.
    std::vector<double> fz(static_cast<size_t>(ksq_max + 1) * 6);
    for (int ksq = 0; ksq <= ksq_max; ++ksq) {
      const double w = -static_cast<double>(ksq) * dt;
      const double z = eta * w;
      double p1, p1p, p1pp;
      phi_factors(z, p1, p1p, p1pp);
      const double ez = std::exp(z);
      double* row = &fz[static_cast<size_t>(ksq) * 6];
      row[0] = ez;
      row[1] = dt * p1;
      row[2] = w * ez;
      row[3] = dt * w * p1p;
      row[4] = w * w * ez;
      row[5] = dt * w * w * p1pp;
    }

    SpectralField U(grid), D(grid), S(grid);
    for (int t = 1; t < F; ++t) {
      for (int idx = 0; idx < grid.size(); ++idx) {
        const double* row = &fz[static_cast<size_t>(ksq_of[idx]) * 6];
        const std::complex<double> cu = U.c[idx], cd = D.c[idx], cs = S.c[idx];
        const std::complex<double> cf = sf[t - 1].c[idx];
        U.c[idx] = row[0] * cu + row[1] * cf;
        D.c[idx] = row[0] * cd + row[2] * cu + row[3] * cf;
        S.c[idx] = row[0] * cs + 2.0 * row[2] * cd + row[4] * cu + row[5] * cf;
      }
      out.value.slabs[node].frames[t] = from_spectral(U);
      out.d_eta.slabs[node].frames[t] = from_spectral(D);
      out.d_eta2.slabs[node].frames[t] = from_spectral(S);
    }
  }
  return out;
}

ParamFlow parametric_heat(const Field& u0, const EtaGrid& eg, double t0, double dt, int frames) {
  if (t0 < 0.0) throw std::invalid_argument("parametric_heat: t0 must be nonnegative");
  const Grid& grid = u0.grid;
  const int n = grid.n;
  const SpectralField s0 = to_spectral(u0);

  ParamFlow out{ParamSlab(eg, grid, t0, dt, frames), ParamSlab(eg, grid, t0, dt, frames),
                ParamSlab(eg, grid, t0, dt, frames)};

  for (int node = 0; node < eg.M; ++node) {
    const double eta = eg.nodes[node];
    for (int m = 0; m < frames; ++m) {
      const double tau = t0 + dt * m;
      SpectralField v(grid), d(grid), d2(grid);
      for (int i = 0; i < n; ++i) {
        const int k1 = grid.wavenumber(i);
        for (int j = 0; j < n; ++j) {
          const int k2 = grid.wavenumber(j);
          const double ksq = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2;
          const double decay = std::exp(-eta * ksq * tau);
          const std::complex<double> base = decay * s0.at(i, j);
          v.at(i, j) = base;
          d.at(i, j) = -ksq * tau * base;
          d2.at(i, j) = ksq * ksq * tau * tau * base;
        }
      }
      out.value.slabs[node].frames[m] = from_spectral(v);
      out.d_eta.slabs[node].frames[m] = from_spectral(d);
      out.d_eta2.slabs[node].frames[m] = from_spectral(d2);
    }
  }
  return out;
}

}  // namespace paracalc
