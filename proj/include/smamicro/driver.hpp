#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "smamicro/elastic_solver.hpp"
#include "smamicro/load.hpp"
#include "smamicro/material.hpp"
#include "smamicro/mesh.hpp"
#include "smamicro/phase_solver.hpp"

namespace smamicro {

/// Raised when an invariant of the alternating scheme is broken (for
/// example the incremental objective increasing across a sweep).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class InitialPhase { random, strips };

struct SolverOptions {
  MinimizerOptions elastic;
  double sweep_rel_tol = 1e-8;
  int max_sweeps = 50;
  double descent_slack = 1e-10;
  /// After the alternating sweeps, also descend over single-triangle flips
  /// and uniform phase fields (y re-minimized for each).
  bool competitor_search = false;
  double competitor_gain = 1e-10;  ///< relative improvement needed to accept a competitor
};

struct SimulationSetup {
  Preset preset = Preset::example1;
  int nx = 16;
  int ny = 8;
  MaterialParams material;
  LoadProgram load;
  InitialPhase initial_phase = InitialPhase::random;
  std::uint64_t seed = 20180901;
  SolverOptions solver;

  /// Paper-style defaults for example1 / example2 (example2 sets alpha_i = 0.001).
  static SimulationSetup for_preset(Preset preset);
};

struct State {
  Positions y;
  PhaseField z;
};

struct LedgerRow {
  int k = 0;
  double t = 0.0;
  double a = 0.0;
  double bulk = 0.0;
  double interface_constant = 0.0;
  double interface_surface = 0.0;
  double dissipation_increment = 0.0;
  double dissipation_cumulative = 0.0;
  double fraction_first = 0.0;  ///< area fraction with z = 1
  int flips = 0;                ///< triangles whose phase changed in this step
  int sweeps = 0;
  std::string status = "ok";

  double stored() const { return bulk + interface_constant + interface_surface; }
};

struct Trajectory {
  std::vector<State> states;     ///< k = 0..N
  std::vector<LedgerRow> ledger; ///< k = 0..N
  bool complete = false;
};

/// Area fraction of triangles with z = 1.
double fraction_first(const Mesh2D& mesh, const PhaseField& z);

/// Unary and pairwise coefficients of the phase subproblem at fixed y.
/// unary_T = (W1(F_T) - W2(F_T) + beta s(z_prev,T)) |T|,
/// weight_E = (alpha_i + alpha_s |cof F n|) |E|.
PhaseProblem assemble_phase_problem(const Mesh2D& mesh, const Material& material, const Positions& y,
                                    const PhaseField& z_prev, double beta);

/// Rate-independent evolution by incremental minimization with alternating
/// elastic and phase solves.
class Simulation {
 public:
  explicit Simulation(SimulationSetup setup);

  const SimulationSetup& setup() const { return setup_; }
  const Mesh2D& mesh() const { return mesh_; }
  const Material& material() const { return material_; }
  const NodeSets& node_sets() const { return node_sets_; }

  /// Constraint map with Dirichlet positions x + u(t, x).
  ConstraintMap constraints_at(double t) const;

  /// Prescribed z(0) before relaxation: seeded random field with both
  /// fractions within 5% of 1/2, or alternating single-layer strips.
  PhaseField initial_phase() const;

  /// Relaxed state at t = 0, computed without dissipation.
  State initial_state(LedgerRow* row = nullptr) const;

  /// Previous positions with the Dirichlet values of step k imposed: the
  /// warm start of step k and the competitor q_{k-1} at time t_k.
  Positions imposed_start(int k, const Positions& previous) const;

  /// Solves step k from the converged state of step k-1.
  State step(int k, const State& previous, LedgerRow* row = nullptr) const;

  /// Stored energy at the given time (the time only enters via constraints,
  /// which are already encoded in `state`).
  StoredEnergy energy(const State& state) const;

  LedgerRow make_row(int k, const State& state, const PhaseField& previous, double cumulative) const;

  using StepCallback = std::function<void(int k, const State&, const LedgerRow&)>;
  Trajectory run(const StepCallback& on_step = {}) const;

  /// Minimizes over y with z fixed, constraints taken at time t.
  MinimizerResult relax(double t, const PhaseField& z, const Positions& start) const;

 private:
  State solve_increment(double t, Positions y, const PhaseField& z_start, const PhaseField& z_prev,
                        double beta, bool search_competitors, LedgerRow* row) const;

  SimulationSetup setup_;
  Mesh2D mesh_;
  Material material_;
  NodeSets node_sets_;
};

struct StabilityViolation {
  std::string competitor;
  double gap = 0.0;  ///< E(q_k) - [E(q~) + D(z_k, z~)], positive means violated
};

struct StabilityReport {
  int k = 0;
  int competitors = 0;
  double worst_gap = 0.0;  ///< max over competitors of the gap (<= tol when stable)
  std::vector<StabilityViolation> violations;
};

struct StabilityOptions {
  double tolerance = 1e-8;
  bool single_flips = true;
  bool uniform = true;
};

/// Checks E(t_k, q_k) <= E(t_k, q~) + D(z_k, z~) over single-triangle flips and
/// the two uniform phase fields, each with y re-minimized from y_k.
StabilityReport stability_diagnostic(const Simulation& sim, int k, const State& state,
                                     const StabilityOptions& options = {});

struct BalanceRow {
  int k = 0;
  double energy = 0.0;           ///< E(t_k, q_k)
  double start_energy = 0.0;     ///< E(t_k, q_{k-1})
  double dissipation = 0.0;      ///< D(z_k, z_{k-1})
  double upper_slack = 0.0;      ///< start_energy - (energy + dissipation), >= -tol expected
  bool upper_ok = true;
  double work = 0.0;             ///< E(t_k, q_{k-1}) - E(t_{k-1}, q_{k-1}), boundary work estimate
  double residual = 0.0;         ///< E(q_k) + Diss_k - E(q_0) - sum of work
};

std::vector<BalanceRow> energy_balance_report(const Simulation& sim, const Trajectory& trajectory,
                                              double tolerance = 1e-8);

}  // namespace smamicro
