#pragma once

#include "paracalc/grid.hpp"

namespace paracalc {

/// Time-indexed stack of fields on a shared grid and uniform time step.
struct TimeSlab {
  Grid grid;
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<Field> frames;

  TimeSlab() = default;
  TimeSlab(const Grid& g, double t0_, double dt_, int frame_count)
      : grid(g), t0(t0_), dt(dt_), frames(frame_count, Field(g)) {
    if (dt_ <= 0.0) throw std::invalid_argument("TimeSlab: dt must be positive");
    if (frame_count < 1) throw std::invalid_argument("TimeSlab: need at least one frame");
  }

  [[nodiscard]] int frame_count() const { return static_cast<int>(frames.size()); }
  [[nodiscard]] double time_of(int m) const { return t0 + dt * m; }
  [[nodiscard]] double horizon() const { return t0 + dt * (frame_count() - 1); }

  /// Frame lookup with past extension: frames before t0 return frame 0.
  [[nodiscard]] const Field& frame_clamped(int m) const {
    return frames[static_cast<size_t>(std::max(m, 0))];
  }

  void check_aligned(const TimeSlab& o) const {
    if (grid != o.grid || frame_count() != o.frame_count() ||
        std::abs(t0 - o.t0) > 1e-14 || std::abs(dt - o.dt) > 1e-14) {
      throw std::invalid_argument("TimeSlab: misaligned time grids");
    }
  }

  /// Broadcast a single field across frames.
  static TimeSlab constant_in_time(const Field& f, double t0, double dt, int frame_count) {
    TimeSlab s(f.grid, t0, dt, frame_count);
    for (auto& fr : s.frames) fr = f;
    return s;
  }
};

/// Discrete time derivative along frames: centered in the interior,
/// one-sided second order at both ends.  Requires >= 3 frames.
[[nodiscard]] TimeSlab time_derivative(const TimeSlab& u);

/// Sup over frames of the sup norm.
[[nodiscard]] double slab_sup_norm(const TimeSlab& u);

}  // namespace paracalc
