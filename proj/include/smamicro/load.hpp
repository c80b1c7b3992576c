#pragma once

#include <vector>

#include "smamicro/mesh.hpp"

namespace smamicro {

struct WaveKnot {
  double t = 0.0;
  double a = 0.0;

  bool operator==(const WaveKnot&) const = default;
};

/// One period of the triangular wave 0 -> 1 -> 0 -> -1 -> 0 over t in [0, 16].
std::vector<WaveKnot> triangular_wave_knots();

/// Time grid, load amplitude and the Dirichlet displacement rule.
///   clamped:        u(t, x) = scale a(t) (x2 - height/2, 0)
///   sheared_ribbon: u(t, x) = scale a(t) (0, x1)
struct LoadProgram {
  double t_final = 16.0;
  int n_steps = 16;
  std::vector<WaveKnot> knots = triangular_wave_knots();
  BoundaryKind boundary = BoundaryKind::clamped;
  double scale = 0.3;
  double height = 1.0;  ///< domain height, sets the clamped midline

  static LoadProgram for_preset(Preset preset);

  /// Throws std::invalid_argument on a bad knot table or step count.
  void validate() const;
  /// t_k = k T / N.
  double time(int k) const;
  /// Piecewise-linear interpolant of the knots. Throws std::out_of_range
  /// outside [0, T].
  double amplitude(double t) const;
  Vec2 displacement(double t, const Vec2& reference) const;
};

}  // namespace smamicro
