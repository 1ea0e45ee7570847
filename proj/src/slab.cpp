#include "paracalc/slab.hpp"

namespace paracalc {

TimeSlab time_derivative(const TimeSlab& u) {
  const int M = u.frame_count();
  if (M < 3) throw std::invalid_argument("time_derivative: need at least 3 frames");
  TimeSlab out(u.grid, u.t0, u.dt, M);
  const double inv2dt = 1.0 / (2.0 * u.dt);
  const int sz = u.grid.size();
  for (int m = 0; m < M; ++m) {
    Field& d = out.frames[m];
    if (m == 0) {
      const auto &f0 = u.frames[0].v, &f1 = u.frames[1].v, &f2 = u.frames[2].v;
      for (int i = 0; i < sz; ++i) d.v[i] = (-3.0 * f0[i] + 4.0 * f1[i] - f2[i]) * inv2dt;
    } else if (m == M - 1) {
      const auto &f0 = u.frames[M - 1].v, &f1 = u.frames[M - 2].v, &f2 = u.frames[M - 3].v;
      for (int i = 0; i < sz; ++i) d.v[i] = (3.0 * f0[i] - 4.0 * f1[i] + f2[i]) * inv2dt;
    } else {
      const auto &fp = u.frames[m + 1].v, &fm = u.frames[m - 1].v;
      for (int i = 0; i < sz; ++i) d.v[i] = (fp[i] - fm[i]) * inv2dt;
    }
  }
  return out;
}

double slab_sup_norm(const TimeSlab& u) {
  double m = 0.0;
  for (const auto& f : u.frames) m = std::max(m, f.sup_norm());
  return m;
}

}  // namespace paracalc
