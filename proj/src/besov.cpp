#include "paracalc/besov.hpp"

#include <cmath>
#include <stdexcept>

#include "paracalc/fft.hpp"
#include "paracalc/partition.hpp"

namespace paracalc {

namespace {

/// All block projections Delta_{-1}..Delta_J from a single forward transform.
std::vector<Field> all_blocks(const Field& f) {
  const DyadicPartition& part = make_partition(f.grid);
  SpectralField s = to_spectral(f);
  std::vector<Field> out;
  out.reserve(part.J + 2);
  for (int j = -1; j <= part.J; ++j) {
    SpectralField b = s;
    project_block(b, part, j);
    out.push_back(from_spectral(b));
  }
  return out;
}

}  // namespace

LineFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need two or more points");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

BesovReport besov_norm(const Field& f, double alpha) {
  const DyadicPartition& part = make_partition(f.grid);
  const std::vector<Field> blocks = all_blocks(f);
  BesovReport rep;
  rep.alpha = alpha;
  rep.block_norms.resize(blocks.size());
  std::vector<double> xs, ys;
  for (int j = -1; j <= part.J; ++j) {
    const double raw = blocks[j + 1].sup_norm();
    rep.block_norms[j + 1] = std::exp2(j * alpha) * raw;
    rep.norm = std::max(rep.norm, rep.block_norms[j + 1]);
    if (j >= 1 && j <= part.J - 1 && raw > 1e-13) {
      xs.push_back(j);
      ys.push_back(std::log2(raw));
    }
  }
  if (xs.size() >= 4) {
    const LineFit fit = fit_line(xs, ys);
    rep.has_slope = true;
    rep.fitted_slope = fit.slope;
    rep.slope_residual = fit.residual;
  }
  return rep;
}

double parabolic_norm(const TimeSlab& u, double alpha) {
  if (u.frame_count() < 2) throw std::invalid_argument("parabolic_norm: need >= 2 frames");
  const DyadicPartition& part = make_partition(u.grid);
  const int F = u.frame_count();

  double space_part = 0.0;
  for (const Field& fr : u.frames) space_part = std::max(space_part, besov_norm(fr, alpha).norm);

  // Hoelder-in-time seminorm of the Besov-0 norm over all ordered pairs; the
  // pair table holds sup_j ||Delta_j (u_t - u_s)||_inf, filled one block at a
  // time so only one block axis is materialized.
  std::vector<double> pair_max(static_cast<size_t>(F) * F, 0.0);
  for (int j = -1; j <= part.J; ++j) {
    std::vector<Field> bj(F, Field(u.grid));
    for (int t = 0; t < F; ++t) bj[t] = lp_block(u.frames[t], j);
    for (int t = 1; t < F; ++t) {
      for (int s = 0; s < t; ++s) {
        const double d = (bj[t] - bj[s]).sup_norm();
        auto& slot = pair_max[static_cast<size_t>(t) * F + s];
        slot = std::max(slot, d);
      }
    }
  }
  double time_part = 0.0;
  for (int t = 1; t < F; ++t) {
    for (int s = 0; s < t; ++s) {
      const double gap = u.dt * (t - s);
      time_part = std::max(time_part,
                           pair_max[static_cast<size_t>(t) * F + s] / std::pow(gap, alpha / 2));
    }
  }
  return space_part + time_part;
}

Field para_lt(const Field& f, const Field& g) {
  f.check_same(g);
  const DyadicPartition& part = make_partition(f.grid);
  const std::vector<Field> bf = all_blocks(f);
  const std::vector<Field> bg = all_blocks(g);
  Field acc(f.grid);
  Field low = bf[0];  // S_1 f = Delta_{-1} f
  for (int j = 1; j <= part.J; ++j) {
    if (j >= 2) low += bf[j - 1];  // S_j = S_{j-1} + Delta_{j-2}
    acc += dealiased_product(low, bg[j + 1]);
  }
  return acc;
}

Field para_gt(const Field& f, const Field& g) { return para_lt(g, f); }

Field resonant(const Field& f, const Field& g) {
  f.check_same(g);
  const DyadicPartition& part = make_partition(f.grid);
  const std::vector<Field> bf = all_blocks(f);
  const std::vector<Field> bg = all_blocks(g);
  Field acc(f.grid);
  for (int i = -1; i <= part.J; ++i) {
    for (int j = std::max(i - 1, -1); j <= std::min(i + 1, part.J); ++j) {
      acc += dealiased_product(bf[i + 1], bg[j + 1]);
    }
  }
  return acc;
}

Field commutator_C(const Field& f, const Field& g, const Field& h) {
  return resonant(para_lt(f, g), h) - dealiased_product(f, resonant(g, h));
}

Field paralin_remainder(const std::function<double(double)>& F,
                        const std::function<double(double)>& dF, const Field& f) {
  return map_field(f, F) - para_lt(map_field(f, dF), f);
}

TimeSlab time_smoothed_para(const TimeSlab& g, const TimeSlab& h) {
  g.check_aligned(h);
  const Grid& grid = g.grid;
  const DyadicPartition& part = make_partition(grid);
  const int F = g.frame_count();

  std::vector<SpectralField> sg(F, SpectralField(grid));
  std::vector<SpectralField> sh(F, SpectralField(grid));
  for (int t = 0; t < F; ++t) {
    sg[t] = to_spectral(g.frames[t]);
    sh[t] = to_spectral(h.frames[t]);
  }

  TimeSlab out(grid, g.t0, g.dt, F);
  for (int j = 1; j <= part.J; ++j) {
    const std::vector<double> taps = kernel_taps(j, g.dt);
    // Modes inside the S_j support; everything else stays zero.
    const std::vector<double>& low = part.low[j];
    std::vector<int> support;
    for (int idx = 0; idx < grid.size(); ++idx)
      if (low[idx] != 0.0) support.push_back(idx);

    for (int t = 0; t < F; ++t) {
      SpectralField conv(grid);
      for (size_t m = 0; m < taps.size(); ++m) {
        const SpectralField& src = sg[std::max(t - static_cast<int>(m), 0)];
        for (int idx : support) conv.c[idx] += taps[m] * low[idx] * src.c[idx];
      }
      SpectralField blk = sh[t];
      project_block(blk, part, j);
      out.frames[t] += dealiased_product(from_spectral(conv), from_spectral(blk));
    }
  }
  return out;
}

RegularityFit estimate_regularity(const Field& f) {
  const DyadicPartition& part = make_partition(f.grid);
  const std::vector<Field> blocks = all_blocks(f);
  std::vector<double> xs, ys;
  for (int j = 1; j <= part.J - 1; ++j) {
    const double raw = blocks[j + 1].sup_norm();
    if (raw > 1e-13) {
      xs.push_back(j);
      ys.push_back(std::log2(raw));
    }
  }
  if (xs.size() < 4)
    throw std::runtime_error("estimate_regularity: insufficient blocks above the noise floor");
  const LineFit fit = fit_line(xs, ys);
  return {-fit.slope, fit.residual, static_cast<int>(xs.size())};
}

namespace {

double inner_field_norm(const Field& f, const std::optional<double>& besov_alpha) {
  return besov_alpha ? besov_norm(f, *besov_alpha).norm : f.sup_norm();
}

double inner_slab_norm(const TimeSlab& s, const std::optional<double>& besov_alpha) {
  double m = 0.0;
  for (const Field& fr : s.frames) m = std::max(m, inner_field_norm(fr, besov_alpha));
  return m;
}

}  // namespace

double eta_sup_norm(const ParamField& h, int k, std::optional<double> besov_alpha) {
  if (k < 0 || k > 2) throw std::invalid_argument("eta_sup_norm: derivative order must be <= 2");
  double best = 0.0;
  for (int n = 0; n <= k; ++n) {
    const ParamField d = param_eta_derivative(h, n);
    for (const Field& f : d.values) best = std::max(best, inner_field_norm(f, besov_alpha));
  }
  return best;
}

double eta_sup_norm(const ParamSlab& h, int k, std::optional<double> besov_alpha) {
  if (k < 0 || k > 2) throw std::invalid_argument("eta_sup_norm: derivative order must be <= 2");
  double best = 0.0;
  for (int n = 0; n <= k; ++n) {
    const ParamSlab d = param_eta_derivative(h, n);
    for (const TimeSlab& s : d.slabs) best = std::max(best, inner_slab_norm(s, besov_alpha));
  }
  return best;
}

}  // namespace paracalc
