#include "smamicro/load.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smamicro {

std::vector<WaveKnot> triangular_wave_knots() {
  return {{0.0, 0.0}, {4.0, 1.0}, {8.0, 0.0}, {12.0, -1.0}, {16.0, 0.0}};
}

LoadProgram LoadProgram::for_preset(Preset preset) {
  LoadProgram program;
  if (preset == Preset::example2) {
    program.boundary = BoundaryKind::sheared_ribbon;
    program.scale = 0.4;
  }
  return program;
}

void LoadProgram::validate() const {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("t_final must be > 0");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
  if (!std::isfinite(scale)) throw std::invalid_argument("load scale must be finite");
  if (knots.size() < 2) throw std::invalid_argument("wave needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (!std::isfinite(knots[i].t) || !std::isfinite(knots[i].a)) {
      throw std::invalid_argument("wave knot " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(knots[i].t > knots[i - 1].t)) {
      throw std::invalid_argument("wave knot times must be strictly increasing");
    }
  }
  if (knots.front().t > 0.0 || knots.back().t < t_final) {
    throw std::invalid_argument("wave knots must cover [0, t_final]");
  }
}

double LoadProgram::time(int k) const {
  if (k < 0 || k > n_steps) throw std::out_of_range("step index outside 0..N");
  return k == n_steps ? t_final : k * t_final / n_steps;
}

double LoadProgram::amplitude(double t) const {
  if (!(t >= 0.0 && t <= t_final)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, " + std::to_string(t_final) + "]");
  }
  for (std::size_t i = 1; i < knots.size(); ++i) {
    if (t <= knots[i].t) {
      const WaveKnot& lo = knots[i - 1];
      const WaveKnot& hi = knots[i];
      if (t == hi.t) return hi.a;
      const double s = (t - lo.t) / (hi.t - lo.t);
      return lo.a + s * (hi.a - lo.a);
    }
  }
  return knots.back().a;
}

Vec2 LoadProgram::displacement(double t, const Vec2& x) const {
  const double a = amplitude(t);
  if (boundary == BoundaryKind::clamped) return Vec2(scale * a * (x.y() - 0.5 * height), 0.0);
  return Vec2(0.0, scale * a * x.x());
}

}  // namespace smamicro
