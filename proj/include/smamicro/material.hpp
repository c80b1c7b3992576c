#pragma once

#include <optional>

#include "smamicro/mesh.hpp"

namespace smamicro {

/// Martensitic variant. Phase value z = 1 selects `first` (stretch F1),
/// z = 0 selects `second` (stretch F2).
enum class Variant { first = 1, second = 2 };

/// Coefficients of the two-variant Mooney-Rivlin model. Defaults are the
/// values used for both loading experiments.
struct MaterialParams {
  double alpha = 1.0;    ///< trace coefficient
  double delta1 = 1.0;   ///< (det F)^2 coefficient
  double delta2 = 4.0;   ///< log-barrier coefficient, must equal 2 alpha + 2 delta1
  double epsilon = 0.3;  ///< shear of the stretching matrices
  double beta = 0.1;     ///< dissipation per unit area per unit |dz|
  double alpha_i = 0.0;  ///< interfacial energy per unit reference edge length
  double alpha_s = 0.0;  ///< interfacial energy per unit deformed edge length

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;

  bool operator==(const MaterialParams&) const = default;
};

/// Validated parameters plus the cached stretching matrices.
class Material {
 public:
  explicit Material(const MaterialParams& params);

  const MaterialParams& params() const { return params_; }
  const Mat2& stretch(Variant v) const { return v == Variant::first ? f1_ : f2_; }
  const Mat2& stretch_inverse(Variant v) const { return v == Variant::first ? f1_inv_ : f2_inv_; }

 private:
  MaterialParams params_;
  Mat2 f1_, f2_, f1_inv_, f2_inv_;
};

/// 2D cofactor matrix [[F22, -F21], [-F12, F11]].
Mat2 cofactor(const Mat2& f);

/// alpha tr(F^T F) + delta1 (det F)^2 - delta2 ln det F. Empty when det F <= 0
/// (the density is +infinity there).
std::optional<double> mooney_rivlin(const Mat2& f, const MaterialParams& params);

/// Same density written in C = F^T F: alpha tr C + delta1 det C - delta2/2 ln det C.
std::optional<double> mooney_rivlin_green(const Mat2& c, const MaterialParams& params);

/// W(F F_v^{-1}).
std::optional<double> variant_density(const Mat2& f, Variant v, const Material& material);

/// variant_density minus its minimum value 2 alpha + delta1, evaluated so that
/// rounding stays relative to the excess rather than to the full density.
std::optional<double> variant_density_excess(const Mat2& f, Variant v, const Material& material);

/// W_C(F_v^{-T} C F_v^{-1}) with C = F^T F; agrees with variant_density.
std::optional<double> variant_density_green(const Mat2& f, Variant v, const Material& material);

/// First Piola-Kirchhoff stress dW_v/dF. With G = F F_v^{-1}:
/// [2 alpha G + (2 delta1 (det G)^2 - delta2) G^{-T}] F_v^{-T}.
std::optional<Mat2> variant_density_gradient(const Mat2& f, Variant v, const Material& material);

/// |cof(F (I - n n^T)) n|, the surface Jacobian of an edge with unit normal n.
double surface_cofactor_stretch(const Mat2& f, const Vec2& normal);

/// |F t| for unit tangent t. Equals surface_cofactor_stretch for t = rot90(n).
double edge_stretch(const Mat2& f, const Vec2& tangent);

/// s(0) = 1, s(1) = -1.
inline int dissipation_sign(int z_old) { return z_old == 0 ? 1 : -1; }

/// beta |z_new - z_old| area.
double dissipation_increment(int z_new, int z_old, double beta, double area);

}  // namespace smamicro
