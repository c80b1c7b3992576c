#include "smamicro/material.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/LU>

namespace smamicro {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void MaterialParams::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be > 0");
  require(std::isfinite(delta1) && delta1 > 0.0, "delta1 must be > 0");
  require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be >= 0");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
  require(std::isfinite(alpha_i) && alpha_i >= 0.0, "alpha_i must be >= 0");
  require(std::isfinite(alpha_s) && alpha_s >= 0.0, "alpha_s must be >= 0");
  // Places the energy well exactly at SO(2).
  const double expected = 2.0 * alpha + 2.0 * delta1;
  if (std::abs(delta2 - expected) > 1e-12 * std::max(1.0, std::abs(expected))) {
    throw std::invalid_argument("delta2 must equal 2*alpha + 2*delta1 = " + std::to_string(expected) +
                                ", got " + std::to_string(delta2));
  }
}

Material::Material(const MaterialParams& params) : params_(params) {
  params_.validate();
  const double e = params_.epsilon;
  f1_ << 1.0, e, 0.0, 1.0;
  f2_ << 1.0, -e, 0.0, 1.0;
  f1_inv_ << 1.0, -e, 0.0, 1.0;
  f2_inv_ << 1.0, e, 0.0, 1.0;
}

Mat2 cofactor(const Mat2& f) {
  Mat2 c;
  c << f(1, 1), -f(1, 0), -f(0, 1), f(0, 0);
  return c;
}

std::optional<double> mooney_rivlin(const Mat2& f, const MaterialParams& params) {
  const double det = f.determinant();
  if (!(det > 0.0)) return std::nullopt;
  return params.alpha * f.squaredNorm() + params.delta1 * det * det - params.delta2 * std::log(det);
}

std::optional<double> mooney_rivlin_green(const Mat2& c, const MaterialParams& params) {
  const double det = c.determinant();
  if (!(det > 0.0)) return std::nullopt;
  return params.alpha * c.trace() + params.delta1 * det - 0.5 * params.delta2 * std::log(det);
}

std::optional<double> variant_density(const Mat2& f, Variant v, const Material& material) {
  return mooney_rivlin(f * material.stretch_inverse(v), material.params());
}

std::optional<double> variant_density_excess(const Mat2& f, Variant v, const Material& material) {
  // Written in H = G - I: |G|^2 - 2 = 2 tr H + |H|^2 and det G - 1 = tr H + det H.
  const Mat2 h = f * material.stretch_inverse(v) - Mat2::Identity();
  const double tr = h.trace();
  const double dj = tr + h.determinant();
  if (!(dj > -1.0)) return std::nullopt;
  const MaterialParams& p = material.params();
  return p.alpha * (2.0 * tr + h.squaredNorm()) + p.delta1 * dj * (dj + 2.0) - p.delta2 * std::log1p(dj);
}

std::optional<double> variant_density_green(const Mat2& f, Variant v, const Material& material) {
  if (!(f.determinant() > 0.0)) return std::nullopt;
  const Mat2& inv = material.stretch_inverse(v);
  const Mat2 c = f.transpose() * f;
  return mooney_rivlin_green(inv.transpose() * c * inv, material.params());
}

std::optional<Mat2> variant_density_gradient(const Mat2& f, Variant v, const Material& material) {
  const Mat2& inv = material.stretch_inverse(v);
  const Mat2 g = f * inv;
  const double det = g.determinant();
  if (!(det > 0.0)) return std::nullopt;
  const MaterialParams& p = material.params();
  // G^{-T} = cof(G) / det G.
  const Mat2 g_inv_t = cofactor(g) / det;
  const Mat2 stress_g = 2.0 * p.alpha * g + (2.0 * p.delta1 * det * det - p.delta2) * g_inv_t;
  return Mat2(stress_g * inv.transpose());
}

double surface_cofactor_stretch(const Mat2& f, const Vec2& normal) {
  const Mat2 surface = f * (Mat2::Identity() - normal * normal.transpose());
  return (cofactor(surface) * normal).norm();
}

double edge_stretch(const Mat2& f, const Vec2& tangent) { return (f * tangent).norm(); }

double dissipation_increment(int z_new, int z_old, double beta, double area) {
  return beta * std::abs(z_new - z_old) * area;
}

}  // namespace smamicro
