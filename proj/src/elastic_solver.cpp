#include "smamicro/elastic_solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace smamicro {

Positions reference_positions(const Mesh2D& mesh) {
  Positions y(2, mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) y.col(n) = mesh.nodes()[n];
  return y;
}

ConstraintMap::ConstraintMap(const Mesh2D& mesh, const NodeSets& sets)
    : mesh_(&mesh),
      sets_(sets),
      unknown_of_(static_cast<std::size_t>(mesh.num_nodes()), -1),
      master_of_(static_cast<std::size_t>(mesh.num_nodes()), -1),
      dirichlet_(static_cast<std::size_t>(mesh.num_nodes()), false),
      dirichlet_position_(mesh.nodes()),
      periodic_offset_(0.0, mesh.height()) {
  for (int n : sets_.dirichlet) dirichlet_.at(n) = true;
  for (const PeriodicPair& p : sets_.periodic) {
    if (dirichlet_.at(p.slave)) throw std::invalid_argument("periodic slave is also a Dirichlet node");
    master_of_.at(p.slave) = p.master;
  }
  for (int n : sets_.free) {
    if (dirichlet_.at(n) || master_of_.at(n) >= 0) {
      throw std::invalid_argument("free node listed as constrained");
    }
    unknown_of_[n] = static_cast<int>(free_nodes_.size());
    free_nodes_.push_back(n);
  }
  for (const PeriodicPair& p : sets_.periodic) {
    if (unknown_of_.at(p.master) < 0 && !dirichlet_.at(p.master)) {
      throw std::invalid_argument("periodic master must be free or Dirichlet");
    }
  }

  unknown_areas_ = Eigen::VectorXd::Zero(num_unknowns());
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    for (int node : mesh.triangles()[t]) {
      const int owner = master_of_[node] >= 0 ? master_of_[node] : node;
      const int u = unknown_of_[owner];
      if (u < 0) continue;
      unknown_areas_[2 * u] += mesh.areas()[t] / 3.0;
      unknown_areas_[2 * u + 1] += mesh.areas()[t] / 3.0;
    }
  }
}

int ConstraintMap::owner_unknown(int node) const {
  const int owner = master_of_[node] >= 0 ? master_of_[node] : node;
  return unknown_of_[owner];
}

void ConstraintMap::set_dirichlet(const std::function<Vec2(const Vec2&)>& position_of) {
  for (int n : sets_.dirichlet) dirichlet_position_[n] = position_of(mesh_->nodes()[n]);
}

Eigen::VectorXd ConstraintMap::reduce(const Positions& y) const {
  Eigen::VectorXd x(num_unknowns());
  for (std::size_t u = 0; u < free_nodes_.size(); ++u) {
    x.segment<2>(2 * static_cast<Eigen::Index>(u)) = y.col(free_nodes_[u]);
  }
  return x;
}

Positions ConstraintMap::expand(const Eigen::VectorXd& x) const {
  Positions y(2, mesh_->num_nodes());
  for (std::size_t u = 0; u < free_nodes_.size(); ++u) {
    y.col(free_nodes_[u]) = x.segment<2>(2 * static_cast<Eigen::Index>(u));
  }
  for (int n : sets_.dirichlet) y.col(n) = dirichlet_position_[n];
  for (const PeriodicPair& p : sets_.periodic) y.col(p.slave) = y.col(p.master) + periodic_offset_;
  return y;
}

void ConstraintMap::impose(Positions& y) const {
  for (int n : sets_.dirichlet) y.col(n) = dirichlet_position_[n];
  for (const PeriodicPair& p : sets_.periodic) y.col(p.slave) = y.col(p.master) + periodic_offset_;
}

Eigen::VectorXd ConstraintMap::reduce_gradient(const Positions& full_gradient) const {
  Eigen::VectorXd g(num_unknowns());
  for (std::size_t u = 0; u < free_nodes_.size(); ++u) {
    g.segment<2>(2 * static_cast<Eigen::Index>(u)) = full_gradient.col(free_nodes_[u]);
  }
  for (const PeriodicPair& p : sets_.periodic) {
    const int u = unknown_of_[p.master];
    if (u >= 0) g.segment<2>(2 * u) += full_gradient.col(p.slave);
  }
  return g;
}

std::optional<StoredEnergy> stored_energy(const Mesh2D& mesh, const Material& material,
                                          const Positions& y, const PhaseField& z) {
  StoredEnergy e;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Mat2 f = mesh.deformation_gradient(y, t);
    const auto w = variant_density(f, z[t] ? Variant::first : Variant::second, material);
    if (!w) return std::nullopt;
    e.bulk += *w * mesh.areas()[t];
  }
  const MaterialParams& p = material.params();
  for (const InteriorEdge& edge : mesh.interior_edges()) {
    if (z[edge.plus] == z[edge.minus]) continue;
    e.interface_constant += p.alpha_i * edge.length;
    if (p.alpha_s != 0.0) {
      // |cof F n| |E| is the deformed edge length.
      e.interface_surface += p.alpha_s * (y.col(edge.nodes[1]) - y.col(edge.nodes[0])).norm();
    }
  }
  return e;
}

double dissipation_distance(const Mesh2D& mesh, double beta, const PhaseField& z,
                            const PhaseField& z_prev) {
  double d = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    d += dissipation_increment(z[t], z_prev[t], beta, mesh.areas()[t]);
  }
  return d;
}

double min_jacobian(const Mesh2D& mesh, const Positions& y) {
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    m = std::min(m, mesh.deformation_gradient(y, t).determinant());
  }
  return m;
}

ElasticObjective::ElasticObjective(const Mesh2D& mesh, const Material& material, PhaseField z,
                                   ConstraintMap constraints, bool include_surface_term)
    : mesh_(&mesh),
      material_(&material),
      z_(std::move(z)),
      constraints_(std::move(constraints)),
      include_surface_(include_surface_term),
      well_offset_((material.params().alpha * 2.0 + material.params().delta1) * mesh.total_area()) {
  if (static_cast<int>(z_.size()) != mesh.num_triangles()) {
    throw std::invalid_argument("elastic objective: phase field size does not match the mesh");
  }
}

std::optional<double> ElasticObjective::energy(const Positions& y) const {
  const auto e = excess_energy(y);
  if (!e) return std::nullopt;
  return *e + well_offset_;
}

std::optional<double> ElasticObjective::energy_and_gradient(const Positions& y, Positions& gradient) const {
  const auto e = excess_and_gradient(y, gradient);
  if (!e) return std::nullopt;
  return *e + well_offset_;
}

std::optional<double> ElasticObjective::excess_energy(const Positions& y) const {
  double total = 0.0;
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const Mat2 f = mesh_->deformation_gradient(y, t);
    const auto w = variant_density_excess(f, z_[t] ? Variant::first : Variant::second, *material_);
    if (!w) return std::nullopt;
    total += *w * mesh_->areas()[t];
  }
  const double alpha_s = material_->params().alpha_s;
  if (include_surface_ && alpha_s != 0.0) {
    for (const InteriorEdge& edge : mesh_->interior_edges()) {
      if (z_[edge.plus] == z_[edge.minus]) continue;
      total += alpha_s * (y.col(edge.nodes[1]) - y.col(edge.nodes[0])).norm();
    }
  }
  return total;
}

std::optional<double> ElasticObjective::excess_and_gradient(const Positions& y, Positions& gradient) const {
  gradient = Positions::Zero(2, mesh_->num_nodes());
  double total = 0.0;
  for (int t = 0; t < mesh_->num_triangles(); ++t) {
    const auto& tri = mesh_->triangles()[t];
    const Mat2 f = mesh_->deformation_gradient(y, t);
    const Variant v = z_[t] ? Variant::first : Variant::second;
    const auto w = variant_density_excess(f, v, *material_);
    if (!w) return std::nullopt;
    const double area = mesh_->areas()[t];
    total += *w * area;
    // F = Ds Dm^{-1}  =>  dE/dDs = area P Dm^{-T}.
    const Mat2 h = area * (*variant_density_gradient(f, v, *material_)) *
                   mesh_->reference_inverse(t).transpose();
    gradient.col(tri[1]) += h.col(0);
    gradient.col(tri[2]) += h.col(1);
    gradient.col(tri[0]) -= h.col(0) + h.col(1);
  }
  const double alpha_s = material_->params().alpha_s;
  if (include_surface_ && alpha_s != 0.0) {
    for (const InteriorEdge& edge : mesh_->interior_edges()) {
      if (z_[edge.plus] == z_[edge.minus]) continue;
      const Vec2 d = y.col(edge.nodes[1]) - y.col(edge.nodes[0]);
      const double len = d.norm();
      total += alpha_s * len;
      if (len > 0.0) {
        const Vec2 dir = alpha_s * d / len;
        gradient.col(edge.nodes[1]) += dir;
        gradient.col(edge.nodes[0]) -= dir;
      }
    }
  }
  return total;
}

std::optional<double> ElasticObjective::evaluate(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
  const auto e = evaluate_excess(x, gradient);
  if (!e) return std::nullopt;
  return *e + well_offset_;
}

std::optional<double> ElasticObjective::evaluate_excess(const Eigen::VectorXd& x, Eigen::VectorXd* gradient) const {
  const Positions y = constraints_.expand(x);
  if (!gradient) return excess_energy(y);
  Positions full;
  const auto e = excess_and_gradient(y, full);
  if (!e) return std::nullopt;
  *gradient = constraints_.reduce_gradient(full);
  return e;
}

std::string_view minimizer_status_name(MinimizerStatus status) {
  switch (status) {
    case MinimizerStatus::converged: return "converged";
    case MinimizerStatus::max_iterations: return "max_iterations";
    case MinimizerStatus::stalled: return "stalled";
  }
  return "?";
}

namespace {

double scaled_max_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& areas) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g[i]) / areas[i]);
  return m;
}

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Inverse of K + 1e-3 M on the reduced unknowns, K the P1 stiffness of the
// scalar Laplacian repeated per component and M the lumped mass. Identity
// when disabled.
class StiffnessPreconditioner {
 public:
  StiffnessPreconditioner(const ElasticObjective& objective, bool enabled) {
    const ConstraintMap& map = objective.constraints();
    const Mesh2D& mesh = objective.mesh();
    const int n = map.num_unknowns();
    if (!enabled || n == 0) return;
    std::vector<Eigen::Triplet<double>> entries;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
      const auto& tri = mesh.triangles()[t];
      const Mat2& inv = mesh.reference_inverse(t);
      Vec2 grads[3];
      grads[1] = inv.row(0).transpose();
      grads[2] = inv.row(1).transpose();
      grads[0] = -grads[1] - grads[2];
      for (int a = 0; a < 3; ++a) {
        const int ua = map.owner_unknown(tri[a]);
        if (ua < 0) continue;
        for (int b = 0; b < 3; ++b) {
          const int ub = map.owner_unknown(tri[b]);
          if (ub < 0) continue;
          const double k = mesh.areas()[t] * grads[a].dot(grads[b]);
          entries.emplace_back(2 * ua, 2 * ub, k);
          entries.emplace_back(2 * ua + 1, 2 * ub + 1, k);
        }
      }
    }
    for (int i = 0; i < n; ++i) entries.emplace_back(i, i, 1e-3 * map.unknown_areas()[i]);
    Eigen::SparseMatrix<double> k(n, n);
    k.setFromTriplets(entries.begin(), entries.end());
    factor_.compute(k);
    active_ = factor_.info() == Eigen::Success;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return active_ ? Eigen::VectorXd(factor_.solve(v)) : v; }

 private:
  bool active_ = false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor_;
};

Eigen::VectorXd two_loop_direction(const Eigen::VectorXd& g, const std::deque<CurvaturePair>& memory,
                                   const StiffnessPreconditioner& pre) {
  Eigen::VectorXd q = g;
  std::vector<double> alphas(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alphas[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alphas[i] * memory[i].y;
  }
  Eigen::VectorXd r = pre.apply(q);
  if (!memory.empty()) {
    const auto& last = memory.back();
    r *= last.s.dot(last.y) / last.y.dot(pre.apply(last.y));
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double b = memory[i].rho * memory[i].y.dot(r);
    r += (alphas[i] - b) * memory[i].s;
  }
  return -r;
}

}  // namespace

MinimizerResult minimize(const ElasticObjective& objective, const Positions& initial,
                         const MinimizerOptions& options) {
  const ConstraintMap& constraints = objective.constraints();
  Eigen::VectorXd x = constraints.reduce(initial);
  Eigen::VectorXd g;
  const auto start = objective.evaluate_excess(x, &g);
  if (!start) throw std::invalid_argument("elastic minimization started from an inadmissible configuration");

  MinimizerResult result;
  double f = *start;
  const double offset = objective.well_offset();
  result.energy_history.push_back(f + offset);
  const Eigen::VectorXd& areas = constraints.unknown_areas();

  if (x.size() == 0) {
    result.positions = constraints.expand(x);
    result.energy = f + offset;
    return result;
  }

  const StiffnessPreconditioner pre(objective, options.stiffness_preconditioner);
  std::deque<CurvaturePair> memory;
  double gnorm = scaled_max_norm(g, areas);
  int iter = 0;
  result.status = MinimizerStatus::max_iterations;
  while (true) {
    if (gnorm <= options.gradient_tol) {
      result.status = MinimizerStatus::converged;
      break;
    }
    if (iter >= options.max_iterations) break;

    Eigen::VectorXd d = two_loop_direction(g, memory, pre);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = -pre.apply(g);
      slope = g.dot(d);
    }

    bool accepted = false;
    Eigen::VectorXd x_new, g_new;
    double f_new = f;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      double step = 1.0;
      for (int k = 0; k < options.max_backtracks; ++k, step *= 0.5) {
        x_new = x + step * d;
        const auto trial = objective.evaluate_excess(x_new, &g_new);
        if (trial && *trial <= f + options.sufficient_decrease * step * slope && *trial < f) {
          f_new = *trial;
          accepted = true;
          break;
        }
      }
      if (!accepted && !memory.empty()) {
        // Retry once along (preconditioned) steepest descent with a fresh memory.
        memory.clear();
        d = -pre.apply(g);
        slope = g.dot(d);
      } else {
        break;
      }
    }
    if (!accepted) {
      result.status = MinimizerStatus::stalled;
      break;
    }

    CurvaturePair pair{x_new - x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (static_cast<int>(memory.size()) > options.memory) memory.pop_front();
    }
    x = std::move(x_new);
    g = std::move(g_new);
    f = f_new;
    gnorm = scaled_max_norm(g, areas);
    result.energy_history.push_back(f + offset);
    ++iter;
  }

  result.positions = constraints.expand(x);
  result.energy = f + offset;
  result.gradient_norm = gnorm;
  result.iterations = iter;
  return result;
}

}  // namespace smamicro
