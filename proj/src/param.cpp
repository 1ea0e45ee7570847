#include "paracalc/param.hpp"

#include <cmath>
#include <stdexcept>

namespace paracalc {

EtaGrid::EtaGrid(double lambda_, int M_) : lambda(lambda_), M(M_) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("EtaGrid: lambda must lie in (0,1)");
  if (M < 5) throw std::invalid_argument("EtaGrid: need at least 5 nodes");
  nodes.resize(M);
  bary_.resize(M);
  const double mid = 0.5 * (1.0 + lambda);
  const double half = 0.5 * (1.0 - lambda);
  for (int i = 0; i < M; ++i) {
    nodes[i] = mid - half * std::cos(two_pi / 2 * i / (M - 1));
    bary_[i] = (i % 2 == 0 ? 1.0 : -1.0);
  }
  bary_.front() *= 0.5;
  bary_.back() *= 0.5;
  nodes.front() = lambda;
  nodes.back() = 1.0;

  diff_.assign(static_cast<size_t>(M) * M, 0.0);
  for (int i = 0; i < M; ++i) {
    double row = 0.0;
    for (int j = 0; j < M; ++j) {
      if (j == i) continue;
      const double d = (bary_[j] / bary_[i]) / (nodes[i] - nodes[j]);
      diff_[static_cast<size_t>(i) * M + j] = d;
      row += d;
    }
    diff_[static_cast<size_t>(i) * M + i] = -row;
  }
}

std::vector<double> EtaGrid::interp_weights(double eta) const {
  std::vector<double> w(M, 0.0);
  for (int i = 0; i < M; ++i) {
    if (std::abs(eta - nodes[i]) < 1e-14) {
      w[i] = 1.0;
      return w;
    }
  }
  double s = 0.0;
  for (int i = 0; i < M; ++i) {
    w[i] = bary_[i] / (eta - nodes[i]);
    s += w[i];
  }
  for (double& x : w) x /= s;
  return w;
}

const std::vector<double>& EtaGrid::diff_matrix() const { return diff_; }

void ParamField::check_consistent() const {
  if (static_cast<int>(values.size()) != eta.M)
    throw std::invalid_argument("ParamField: node count mismatch");
  const Grid& g = values.front().grid;
  for (const Field& f : values) {
    if (f.grid != g) throw std::invalid_argument("ParamField: grid mismatch across nodes");
  }
  if (form == EtaForm::generic) return;
  const int p = form == EtaForm::inverse_eta ? 1 : 2;
  double scale = 1.0, worst = 0.0;
  for (int i = 0; i < eta.M; ++i) {
    const double pow0 = std::pow(eta.nodes[0], p);
    const double powi = std::pow(eta.nodes[i], p);
    for (int x = 0; x < g.size(); ++x) {
      const double base = values[0].v[x] * pow0;
      worst = std::max(worst, std::abs(values[i].v[x] - base / powi));
      scale = std::max(scale, std::abs(base));
    }
  }
  if (worst > 1e-8 * scale)
    throw std::invalid_argument("ParamField: node values contradict the closed-form tag");
}

ParamField ParamField::eta_independent(const EtaGrid& e, const Field& f) {
  ParamField h(e, f.grid);
  for (Field& v : h.values) v = f;
  return h;
}

ParamField ParamField::over_eta(const EtaGrid& e, const Field& base) {
  ParamField h(e, base.grid, EtaForm::inverse_eta);
  for (int i = 0; i < e.M; ++i) h.values[i] = base * (1.0 / e.nodes[i]);
  return h;
}

ParamField ParamField::over_eta_sq(const EtaGrid& e, const Field& base) {
  ParamField h(e, base.grid, EtaForm::inverse_eta_sq);
  for (int i = 0; i < e.M; ++i) h.values[i] = base * (1.0 / (e.nodes[i] * e.nodes[i]));
  return h;
}

void ParamSlab::check_consistent() const {
  if (static_cast<int>(slabs.size()) != eta.M)
    throw std::invalid_argument("ParamSlab: node count mismatch");
  for (const TimeSlab& s : slabs) slabs.front().check_aligned(s);
}

ParamField ParamSlab::frame_slice(int m) const {
  ParamField h(eta, grid(), form);
  for (int i = 0; i < eta.M; ++i) h.values[i] = slabs[i].frames.at(m);
  return h;
}

ParamSlab ParamSlab::eta_independent(const EtaGrid& e, const TimeSlab& s) {
  ParamSlab out(e, s.grid, s.t0, s.dt, s.frame_count());
  for (TimeSlab& slab : out.slabs) slab = s;
  return out;
}

namespace {

void check_eta_range(double eta_star, const EtaGrid& e, double tol) {
  if (eta_star < e.lambda - tol || eta_star > 1.0 + tol)
    throw std::invalid_argument("eta value outside [lambda, 1]");
}

}  // namespace

Field eval_param(const ParamField& h, double eta_star) {
  check_eta_range(eta_star, h.eta, 1e-12);
  const Grid& g = h.grid();
  switch (h.form) {
    case EtaForm::inverse_eta:
      return h.values[0] * (h.eta.nodes[0] / eta_star);
    case EtaForm::inverse_eta_sq: {
      const double r = h.eta.nodes[0] / eta_star;
      return h.values[0] * (r * r);
    }
    case EtaForm::generic:
      break;
  }
  const std::vector<double> w = h.eta.interp_weights(eta_star);
  Field out(g);
  for (int i = 0; i < h.eta.M; ++i) {
    for (int x = 0; x < g.size(); ++x) out.v[x] += w[i] * h.values[i].v[x];
  }
  return out;
}

Field eval_field(const ParamField& h, const Field& m, double range_tol) {
  const Grid& g = h.grid();
  m.check_same(h.values[0]);
  Field out(g);
  switch (h.form) {
    case EtaForm::inverse_eta: {
      const double e0 = h.eta.nodes[0];
      for (int x = 0; x < g.size(); ++x) {
        check_eta_range(m.v[x], h.eta, range_tol);
        out.v[x] = h.values[0].v[x] * e0 / m.v[x];
      }
      return out;
    }
    case EtaForm::inverse_eta_sq: {
      const double e0 = h.eta.nodes[0] * h.eta.nodes[0];
      for (int x = 0; x < g.size(); ++x) {
        check_eta_range(m.v[x], h.eta, range_tol);
        out.v[x] = h.values[0].v[x] * e0 / (m.v[x] * m.v[x]);
      }
      return out;
    }
    case EtaForm::generic:
      break;
  }
  for (int x = 0; x < g.size(); ++x) {
    check_eta_range(m.v[x], h.eta, range_tol);
    const std::vector<double> w = h.eta.interp_weights(m.v[x]);
    double s = 0.0;
    for (int i = 0; i < h.eta.M; ++i) s += w[i] * h.values[i].v[x];
    out.v[x] = s;
  }
  return out;
}

ParamField param_eta_derivative(const ParamField& h, int n) {
  if (n < 0 || n > 2) throw std::invalid_argument("eta derivative order must be 0, 1 or 2");
  if (n == 0) return h;
  const Grid& g = h.grid();
  const int M = h.eta.M;

  if (h.form == EtaForm::inverse_eta) {
    Field base = h.values[0] * h.eta.nodes[0];
    if (n == 1) return ParamField::over_eta_sq(h.eta, base * (-1.0));
    ParamField out(h.eta, g);  // exact node values 2 base / eta^3
    for (int i = 0; i < M; ++i) {
      const double e = h.eta.nodes[i];
      out.values[i] = base * (2.0 / (e * e * e));
    }
    return out;
  }
  if (h.form == EtaForm::inverse_eta_sq) {
    Field base = h.values[0] * (h.eta.nodes[0] * h.eta.nodes[0]);
    ParamField out(h.eta, g);
    for (int i = 0; i < M; ++i) {
      const double e = h.eta.nodes[i];
      const double f = n == 1 ? -2.0 / (e * e * e) : 6.0 / (e * e * e * e);
      out.values[i] = base * f;
    }
    return out;
  }

  const std::vector<double>& D = h.eta.diff_matrix();
  ParamField cur = h;
  for (int pass = 0; pass < n; ++pass) {
    ParamField next(h.eta, g);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        const double d = D[static_cast<size_t>(i) * M + j];
        if (d == 0.0) continue;
        for (int x = 0; x < g.size(); ++x) next.values[i].v[x] += d * cur.values[j].v[x];
      }
    }
    cur = next;
  }
  return cur;
}

ParamSlab param_eta_derivative(const ParamSlab& h, int n) {
  if (n < 0 || n > 2) throw std::invalid_argument("eta derivative order must be 0, 1 or 2");
  if (n == 0) return h;
  ParamSlab out(h.eta, h.grid(), h.slabs[0].t0, h.slabs[0].dt, h.frame_count());
  for (int m = 0; m < h.frame_count(); ++m) {
    ParamField d = param_eta_derivative(h.frame_slice(m), n);
    for (int i = 0; i < h.eta.M; ++i) out.slabs[i].frames[m] = d.values[i];
  }
  return out;
}

double TimeKernel::operator()(double r) const {
  if (r <= 0.0 || r >= 1.0) return 0.0;
  return c * std::exp(-1.0 / (r * (1.0 - r)));
}

const TimeKernel& make_time_kernel() {
  static const TimeKernel kernel = [] {
    // Simpson quadrature; the integrand vanishes to all orders at 0 and 1,
    // so convergence is spectral in the panel count.
    const int N = 1 << 14;
    const double hstep = 1.0 / N;
    auto raw = [](double r) {
      return (r <= 0.0 || r >= 1.0) ? 0.0 : std::exp(-1.0 / (r * (1.0 - r)));
    };
    double s = 0.0;
    for (int i = 0; i < N; ++i) {
      const double a = i * hstep, b = (i + 1) * hstep;
      s += (raw(a) + 4.0 * raw(0.5 * (a + b)) + raw(b)) * (b - a) / 6.0;
    }
    return TimeKernel{1.0 / s};
  }();
  return kernel;
}

std::vector<double> kernel_taps(int j, double dt) {
  if (dt <= 0.0) throw std::invalid_argument("kernel_taps: dt must be positive");
  const TimeKernel& Q = make_time_kernel();
  const double scale = std::pow(4.0, j);  // support length 1/scale
  const int taps = static_cast<int>(std::floor(1.0 / (scale * dt))) + 1;
  std::vector<double> w(static_cast<size_t>(taps) + 1, 0.0);
  double sum = 0.0;
  for (size_t m = 0; m < w.size(); ++m) {
    const double endpoint = (m == 0 || m + 1 == w.size()) ? 0.5 : 1.0;
    w[m] = endpoint * scale * Q(scale * m * dt) * dt;
    sum += w[m];
  }
  if (sum <= 1e-300) return {1.0};
  for (double& x : w) x /= sum;
  while (w.size() > 1 && w.back() == 0.0) w.pop_back();
  return w;
}

}  // namespace paracalc
