#include "paracalc/solver.hpp"

#include <cmath>
#include <stdexcept>

#include "paracalc/besov.hpp"
#include "paracalc/fft.hpp"
#include "paracalc/nonlinear.hpp"

namespace paracalc {

DiffusionSpec DiffusionSpec::constant(double c) {
  DiffusionSpec s;
  s.a = [c](double) { return c; };
  s.da = [](double) { return 0.0; };
  s.dda = [](double) { return 0.0; };
  return s;
}

namespace {

void check_config(const SolverConfig& cfg) {
  if (cfg.dt <= 0.0) throw std::invalid_argument("solver: dt must be positive");
  if (cfg.T < cfg.dt) throw std::invalid_argument("solver: horizon shorter than one step");
  if (cfg.picard.tolerance <= 0.0)
    throw std::invalid_argument("solver: tolerance must be positive");
  if (cfg.picard.max_iterations < 1)
    throw std::invalid_argument("solver: need at least one iteration");
  if (cfg.imex_split <= 0.0)
    throw std::invalid_argument("solver: implicit split must be positive");
  if (cfg.picard.damping <= 0.0 || cfg.picard.damping > 1.0)
    throw std::invalid_argument("solver: damping must lie in (0, 1]");
}

void check_grid(const SolverConfig& cfg, const Field& f) {
  if (f.grid.n != cfg.n) throw std::invalid_argument("solver: grid size mismatch");
}

int step_count(double T, double dt) {
  const int steps = static_cast<int>(std::llround(T / dt));
  if (steps < 1) throw std::invalid_argument("solver: horizon shorter than one step");
  return steps;
}

template <typename Fn>
TimeSlab map_slab(const TimeSlab& u, Fn&& fn) {
  TimeSlab out = u;
  for (auto& f : out.frames) f = map_field(f, fn);
  return out;
}

TimeSlab lap_slab(const TimeSlab& u) {
  TimeSlab out = u;
  for (auto& f : out.frames) f = laplacian(f);
  return out;
}

TimeSlab& add_into(TimeSlab& a, const TimeSlab& b) {
  a.check_aligned(b);
  for (int m = 0; m < a.frame_count(); ++m) a.frames[m] += b.frames[m];
  return a;
}

/// Time-constant ParamSlab around a ParamField, tag preserved.
ParamSlab time_constant(const ParamField& h, double t0, double dt, int frames) {
  ParamSlab out(h.eta, h.grid(), t0, dt, frames, h.form);
  for (int i = 0; i < h.eta.M; ++i)
    out.slabs[static_cast<size_t>(i)] =
        TimeSlab::constant_in_time(h.values[static_cast<size_t>(i)], t0, dt, frames);
  return out;
}

/// Solve (1 - dt lambda_bar Lap) u_next = u + dt rhs per mode.
Field imex_step(const Field& u, const Field& rhs, double dt, double lam) {
  SpectralField s = to_spectral(u + dt * rhs);
  apply_multiplier(s, [dt, lam](int k1, int k2) {
    return 1.0 / (1.0 + dt * lam * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2));
  });
  return from_spectral(s);
}

/// Shared forcing assembly.  phi carries every term of the display except
/// the Psi correctors; F adds them.  theta and pi_pu0 are reused by the
/// sweep that rebuilds the trajectory.
struct Assembly {
  TimeSlab au;
  TimeSlab theta;
  TimeSlab pi_pu0;
  TimeSlab phi;
  TimeSlab F;
};

Assembly assemble_forcing(const ParacontrolledState& st, const EnhancedNoise& data,
                          const DiffusionSpec& spec, const Field& u0s, bool with_psi) {
  const Grid& grid = st.u.grid;
  const EtaGrid& eg = data.theta.eta;
  const double t0 = st.u.t0, dt = st.u.dt;
  const int frames = st.u.frame_count();

  Assembly out;
  out.au = map_slab(st.u, spec.a);
  TimeSlab dau = map_slab(st.u, spec.da);
  out.theta = nl_para_smoothed(out.au, data.theta);
  TimeSlab lap_theta = lap_slab(out.theta);
  TimeSlab lambda_term = nl_commutator_Lambda(out.au, data.theta);
  TimeSlab pi_usharp = nl_para_smoothed(out.au, st.Usharp);
  ParamFlow pu0 = parametric_heat(u0s, eg, t0, dt, frames);
  out.pi_pu0 = nl_para_smoothed(out.au, pu0.value);

  out.phi = TimeSlab(grid, t0, dt, frames);
  for (int m = 0; m < frames; ++m) {
    const Field& u = st.u.frames[static_cast<size_t>(m)];
    const Field& am = out.au.frames[static_cast<size_t>(m)];
    const Field& dm = dau.frames[static_cast<size_t>(m)];
    const Field& lth = lap_theta.frames[static_cast<size_t>(m)];

    Field t = para_gt(am, laplacian(u));
    t += commutator_C(dm, u, lth);
    t += resonant(paralin_remainder(spec.a, spec.da, u), lth);
    t += dealiased_product(dm, lambda_term.frames[static_cast<size_t>(m)]);
    const Field& pus = pi_usharp.frames[static_cast<size_t>(m)];
    t += dealiased_product(dm, resonant(pus, lth));
    t += resonant(am, laplacian(pus));
    if (m > 0) {
      // The heat-flow couplings blow up as t -> 0 with rough u0sharp; the
      // first frame is zero-extended and the time integral does not care.
      const Field& ppu = out.pi_pu0.frames[static_cast<size_t>(m)];
      t += dealiased_product(dm, resonant(ppu, lth));
      t += resonant(am, laplacian(ppu));
    }
    t += dealiased_product(dm, nl_compose(am, data.xi2));
    out.phi.frames[static_cast<size_t>(m)] = t;
  }

  out.F = out.phi;
  if (with_psi) {
    add_into(out.F, psi(out.au, time_constant(data.theta, t0, dt, frames),
                        ParamSlab::eta_independent(
                            eg, TimeSlab::constant_in_time(data.xi_eps, t0, dt, frames))));
    add_into(out.F, psi(out.au, st.Usharp, ParamSlab::eta_independent(eg, st.forcing)));
    add_into(out.F, psi(out.au, pu0.value, ParamSlab(eg, grid, t0, dt, frames)));
  }
  return out;
}

bool residuals_increasing(const ParacontrolledState& st) {
  const auto& r = st.residuals;
  const size_t mark = static_cast<size_t>(std::max(st.detector_mark, 0));
  if (r.size() < mark + 3) return false;
  const size_t k = r.size();
  return r[k - 1] > r[k - 2] && r[k - 2] > r[k - 3];
}

ParacontrolledState fresh_state(const SolverConfig& cfg, const Grid& grid,
                                const EnhancedNoise& data, const DiffusionSpec& spec,
                                const Field& u0, double T) {
  const int steps = step_count(T, cfg.dt);
  if (steps < 3) throw std::invalid_argument("solver: horizon too short for the time stencils");
  ParacontrolledState st;
  st.u0sharp = usharp0(u0, data.theta, spec);
  st.u = TimeSlab::constant_in_time(u0, 0.0, cfg.dt, steps + 1);
  st.Usharp = ParamSlab(cfg.eta_grid, grid, 0.0, cfg.dt, steps + 1);
  st.theta_slab = TimeSlab(grid, 0.0, cfg.dt, steps + 1);
  st.forcing = TimeSlab(grid, 0.0, cfg.dt, steps + 1);
  return st;
}

}  // namespace

TimeSlab solve_classical_rhs(const SolverConfig& cfg, const DiffusionSpec& spec1,
                             const DiffusionSpec& spec2, const Field& xi_eps, double sigma,
                             const Field& u0) {
  check_config(cfg);
  check_grid(cfg, xi_eps);
  check_grid(cfg, u0);
  const double lam = cfg.imex_split;
  const int steps = step_count(cfg.T, cfg.dt);

  TimeSlab out(u0.grid, 0.0, cfg.dt, steps + 1);
  out.frames[0] = u0;
  for (int m = 0; m < steps; ++m) {
    const Field& u = out.frames[static_cast<size_t>(m)];
    Field rhs = dealiased_product(
        map_field(u, [&](double v) { return spec1.a(v) - lam; }), laplacian(u));
    rhs += dealiased_product(map_field(u, spec2.a), xi_eps);
    rhs += counterterm_rhs(spec1.a, spec1.da, spec2.a, spec2.da, u, sigma, spec1.lambda);
    out.frames[static_cast<size_t>(m + 1)] = imex_step(u, rhs, cfg.dt, lam);
    if (out.frames[static_cast<size_t>(m + 1)].sup_norm() > 1e6)
      throw std::runtime_error("solve_classical: instability - reduce dt");
  }
  return out;
}

TimeSlab solve_classical(const SolverConfig& cfg, const DiffusionSpec& spec, const Field& xi_eps,
                         double sigma, const Field& u0) {
  return solve_classical_rhs(cfg, spec, DiffusionSpec::constant(1.0), xi_eps, sigma, u0);
}

Field usharp0(const Field& u0, const ParamField& theta, const DiffusionSpec& spec) {
  return u0 - nl_para_lt(map_field(u0, spec.a), theta);
}

ParamSlab build_F(ParacontrolledState& state, const EnhancedNoise& data,
                  const DiffusionSpec& spec, const Field& u0sharp) {
  Assembly as = assemble_forcing(state, data, spec, u0sharp, true);
  state.theta_slab = as.theta;
  return ParamSlab::eta_independent(data.theta.eta, as.F);
}

ParacontrolledState gamma_step(const ParacontrolledState& state, const EnhancedNoise& data,
                               const DiffusionSpec& spec, const SolverConfig& cfg) {
  if (residuals_increasing(state))
    throw std::runtime_error("gamma_step: residuals increasing - reduce T");
  if (data.theta.eta != cfg.eta_grid)
    throw std::invalid_argument("gamma_step: eta grids differ between data and config");

  Assembly as = assemble_forcing(state, data, spec, state.u0sharp, true);
  ParamFlow flow = parametric_duhamel(as.F, cfg.eta_grid);

  TimeSlab u_new = as.theta;
  add_into(u_new, nl_para_smoothed(as.au, flow.value));
  add_into(u_new, as.pi_pu0);

  const double w = cfg.picard.damping;
  ParacontrolledState next = state;
  next.theta_slab = as.theta;
  next.Usharp = flow.value;
  next.forcing = as.F;
  double dist = 0.0;
  for (int m = 0; m < u_new.frame_count(); ++m) {
    Field& f = next.u.frames[static_cast<size_t>(m)];
    const Field& g = u_new.frames[static_cast<size_t>(m)];
    for (size_t i = 0; i < f.v.size(); ++i) {
      const double damped = (1.0 - w) * f.v[i] + w * g.v[i];
      dist = std::max(dist, std::abs(damped - f.v[i]));
      f.v[i] = damped;
    }
  }
  next.residuals.push_back(dist);
  return next;
}

ParacontrolledState solve_paracontrolled(const SolverConfig& cfg, const EnhancedNoise& data,
                                         const DiffusionSpec& spec, const Field& u0) {
  check_config(cfg);
  check_grid(cfg, u0);
  if (data.theta.eta != cfg.eta_grid)
    throw std::invalid_argument("solve_paracontrolled: eta grids differ between data and config");
  if (spec.lambda < cfg.eta_grid.lambda)
    throw std::invalid_argument("solve_paracontrolled: diffusivity floor below the eta grid");

  const Grid grid(cfg.n);
  double T = cfg.T;
  for (int halving = 0; halving <= 3; ++halving) {
    ParacontrolledState st = fresh_state(cfg, grid, data, spec, u0, T);
    SolverConfig run = cfg;
    run.T = T;
    bool detector_fired = false;
    for (int it = 0; it < cfg.picard.max_iterations; ++it) {
      if (residuals_increasing(st)) {
        if (run.picard.damping > 0.5) {
          // First intervention: damp the sweep and restart the detector
          // window; only a second firing shortens the horizon.
          run.picard.damping = 0.5;
          st.detector_mark = static_cast<int>(st.residuals.size());
        } else {
          detector_fired = true;
          break;
        }
      }
      st = gamma_step(st, data, spec, run);
      if (st.residuals.back() <= cfg.picard.tolerance) return st;
    }
    if (!detector_fired || halving == 3) break;
    T *= 0.5;
  }
  throw std::runtime_error("solve_paracontrolled: no contraction at this T");
}

Field renormalized_product(const ParacontrolledState& state, const EnhancedNoise& data,
                           const DiffusionSpec& spec, int frame) {
  const int frames = state.u.frame_count();
  const int m = frame < 0 ? frames - 1 : frame;
  if (m >= frames) throw std::invalid_argument("renormalized_product: frame out of range");
  Assembly as = assemble_forcing(state, data, spec, state.u0sharp, false);
  const Field& u = state.u.frames[static_cast<size_t>(m)];
  Field out = para_lt(as.au.frames[static_cast<size_t>(m)], laplacian(u));
  out += as.phi.frames[static_cast<size_t>(m)];
  return out;
}

}  // namespace paracalc
