#pragma once

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "smamicro/material.hpp"
#include "smamicro/mesh.hpp"
#include "smamicro/phase_solver.hpp"

namespace smamicro {

/// Nodal deformed positions, one column per mesh node.
using Positions = Eigen::Matrix2Xd;

/// Identity placement y = x.
Positions reference_positions(const Mesh2D& mesh);

/// Maps between full nodal positions and the reduced vector of free
/// coordinates. Dirichlet nodes carry prescribed positions; periodic slaves
/// follow their master shifted by the domain height.
class ConstraintMap {
 public:
  ConstraintMap(const Mesh2D& mesh, const NodeSets& sets);

  int num_unknowns() const { return 2 * static_cast<int>(free_nodes_.size()); }
  const std::vector<int>& free_nodes() const { return free_nodes_; }
  const NodeSets& node_sets() const { return sets_; }

  /// Sets the prescribed position of every Dirichlet node.
  void set_dirichlet(const std::function<Vec2(const Vec2& reference)>& position_of);
  const Vec2& dirichlet_position(int node) const { return dirichlet_position_[node]; }

  Eigen::VectorXd reduce(const Positions& y) const;
  Positions expand(const Eigen::VectorXd& x) const;
  /// Overwrites Dirichlet nodes and periodic slaves of `y` in place.
  void impose(Positions& y) const;
  /// Sums nodal gradient contributions onto the free unknowns.
  Eigen::VectorXd reduce_gradient(const Positions& full_gradient) const;
  /// Lumped reference area attached to each unknown (slave areas included).
  const Eigen::VectorXd& unknown_areas() const { return unknown_areas_; }
  /// Free index carrying this node's position (its master for periodic
  /// slaves), -1 for Dirichlet nodes.
  int owner_unknown(int node) const;

 private:
  const Mesh2D* mesh_;
  NodeSets sets_;
  std::vector<int> free_nodes_;
  std::vector<int> unknown_of_;   ///< node -> free index, -1 if constrained
  std::vector<int> master_of_;    ///< slave node -> master node, -1 otherwise
  std::vector<bool> dirichlet_;
  std::vector<Vec2> dirichlet_position_;
  Vec2 periodic_offset_;
  Eigen::VectorXd unknown_areas_;
};

struct StoredEnergy {
  double bulk = 0.0;
  double interface_constant = 0.0;  ///< alpha_i |E| summed over phase boundaries
  double interface_surface = 0.0;   ///< alpha_s |cof F n| |E| summed over phase boundaries
  double total() const { return bulk + interface_constant + interface_surface; }
};

/// Bulk plus interfacial energy; empty if any triangle has det F <= 0.
std::optional<StoredEnergy> stored_energy(const Mesh2D& mesh, const Material& material,
                                          const Positions& y, const PhaseField& z);

/// sum_T beta |z - z_prev| |T|.
double dissipation_distance(const Mesh2D& mesh, double beta, const PhaseField& z,
                            const PhaseField& z_prev);

/// Smallest det F over all triangles.
double min_jacobian(const Mesh2D& mesh, const Positions& y);

/// Elastic part of the incremental functional for a fixed phase field.
class ElasticObjective {
 public:
  ElasticObjective(const Mesh2D& mesh, const Material& material, PhaseField z, ConstraintMap constraints,
                   bool include_surface_term = true);

  const Mesh2D& mesh() const { return *mesh_; }
  const PhaseField& phase() const { return z_; }
  const ConstraintMap& constraints() const { return constraints_; }
  ConstraintMap& constraints() { return constraints_; }

  std::optional<double> energy(const Positions& y) const;
  /// Energy and nodal gradient (all nodes, constraints ignored).
  std::optional<double> energy_and_gradient(const Positions& y, Positions& gradient) const;
  /// Energy and gradient in the reduced unknowns.
  std::optional<double> evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const;

  /// Energy minus the well value (2 alpha + delta1) |Omega|. Summing excess
  /// densities keeps rounding small enough for line searches near a minimum.
  std::optional<double> excess_energy(const Positions& y) const;
  std::optional<double> evaluate_excess(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const;
  double well_offset() const { return well_offset_; }

 private:
  const Mesh2D* mesh_;
  const Material* material_;
  PhaseField z_;
  ConstraintMap constraints_;
  bool include_surface_;
  double well_offset_;

  std::optional<double> excess_and_gradient(const Positions& y, Positions& gradient) const;
};

struct MinimizerOptions {
  double gradient_tol = 1e-6;  ///< on max |dE/dx_i| / lumped area_i
  int max_iterations = 2000;
  int memory = 10;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;
  /// Scale the quasi-Newton initial matrix by the inverse P1 stiffness
  /// (vector Laplacian) of the constrained mesh instead of the identity.
  bool stiffness_preconditioner = true;
};

enum class MinimizerStatus { converged, max_iterations, stalled };

std::string_view minimizer_status_name(MinimizerStatus status);

struct MinimizerResult {
  Positions positions;
  double energy = 0.0;
  double gradient_norm = 0.0;  ///< area-scaled max norm at the returned iterate
  int iterations = 0;
  MinimizerStatus status = MinimizerStatus::converged;
  std::vector<double> energy_history;  ///< energy of every accepted iterate, starting point included
};

/// Limited-memory BFGS with backtracking Armijo search. Trial points with a
/// non-positive Jacobian are rejected before the energy is compared. Throws
/// std::invalid_argument when `initial` is inadmissible.
MinimizerResult minimize(const ElasticObjective& objective, const Positions& initial,
                         const MinimizerOptions& options = {});

}  // namespace smamicro
