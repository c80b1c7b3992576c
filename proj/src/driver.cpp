#include "smamicro/driver.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>

namespace smamicro {

SimulationSetup SimulationSetup::for_preset(Preset preset) {
  SimulationSetup setup;
  setup.preset = preset;
  setup.load = LoadProgram::for_preset(preset);
  if (preset == Preset::example2) {
    setup.material.alpha_i = 0.001;
    setup.initial_phase = InitialPhase::strips;
  }
  return setup;
}

double fraction_first(const Mesh2D& mesh, const PhaseField& z) {
  double first = 0.0;
  double total = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    total += mesh.areas()[t];
    if (z[t]) first += mesh.areas()[t];
  }
  return first / total;
}

PhaseProblem assemble_phase_problem(const Mesh2D& mesh, const Material& material, const Positions& y,
                                    const PhaseField& z_prev, double beta) {
  PhaseProblem problem;
  problem.previous = z_prev;
  problem.unary.resize(static_cast<std::size_t>(mesh.num_triangles()));
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    const Mat2 f = mesh.deformation_gradient(y, t);
    const auto w1 = variant_density(f, Variant::first, material);
    const auto w2 = variant_density(f, Variant::second, material);
    if (!w1 || !w2) throw std::invalid_argument("phase problem assembled on an inadmissible deformation");
    problem.unary[t] = (*w1 - *w2 + beta * dissipation_sign(z_prev[t])) * mesh.areas()[t];
  }
  const MaterialParams& p = material.params();
  problem.pairwise.reserve(mesh.interior_edges().size());
  for (const InteriorEdge& edge : mesh.interior_edges()) {
    double weight = p.alpha_i * edge.length;
    if (p.alpha_s != 0.0) {
      weight += p.alpha_s * (y.col(edge.nodes[1]) - y.col(edge.nodes[0])).norm();
    }
    problem.pairwise.push_back({edge.plus, edge.minus, weight});
  }
  return problem;
}

Simulation::Simulation(SimulationSetup setup)
    : setup_(std::move(setup)),
      mesh_(Mesh2D::structured(setup_.nx, setup_.ny)),
      material_(setup_.material),
      node_sets_(mesh_.classify_boundary(setup_.load.boundary)) {
  setup_.load.height = mesh_.height();
  setup_.load.validate();
  if (setup_.solver.max_sweeps < 1) throw std::invalid_argument("max_sweeps must be >= 1");
  if (!(setup_.solver.sweep_rel_tol >= 0.0)) throw std::invalid_argument("sweep_rel_tol must be >= 0");
}

ConstraintMap Simulation::constraints_at(double t) const {
  ConstraintMap map(mesh_, node_sets_);
  const LoadProgram& load = setup_.load;
  map.set_dirichlet([&](const Vec2& x) { return Vec2(x + load.displacement(t, x)); });
  return map;
}

PhaseField Simulation::initial_phase() const {
  const int n = mesh_.num_triangles();
  PhaseField z(static_cast<std::size_t>(n));
  if (setup_.initial_phase == InitialPhase::strips) {
    for (int t = 0; t < n; ++t) z[t] = (mesh_.layer_of(t) % 2 == 0) ? 1 : 0;
    return z;
  }
  // One draw per triangle, top bit of mt19937_64; no std distribution so the
  // sequence does not depend on the standard library implementation.
  std::mt19937_64 rng(setup_.seed);
  for (int attempt = 0; attempt < 100; ++attempt) {
    for (int t = 0; t < n; ++t) z[t] = static_cast<std::uint8_t>(rng() >> 63);
    if (std::abs(fraction_first(mesh_, z) - 0.5) < 0.05) return z;
  }
  throw std::runtime_error("could not draw a balanced random phase field in 100 attempts");
}

MinimizerResult Simulation::relax(double t, const PhaseField& z, const Positions& start) const {
  ElasticObjective objective(mesh_, material_, z, constraints_at(t), true);
  return minimize(objective, start, setup_.solver.elastic);
}

StoredEnergy Simulation::energy(const State& state) const {
  const auto e = stored_energy(mesh_, material_, state.y, state.z);
  if (!e) throw std::invalid_argument("energy requested for an inadmissible state");
  return *e;
}

State Simulation::solve_increment(double t, Positions y, const PhaseField& z_start, const PhaseField& z_prev,
                                  double beta, bool search_competitors, LedgerRow* row) const {
  const SolverOptions& opts = setup_.solver;
  const auto objective_of = [&](const Positions& pos, const PhaseField& z) {
    const auto e = stored_energy(mesh_, material_, pos, z);
    if (!e) throw ContractViolation("alternating solve produced an inadmissible configuration");
    return e->total() + dissipation_distance(mesh_, beta, z, z_prev);
  };
  const auto check_descent = [&](double before, double after, const char* stage) {
    if (after > before + opts.descent_slack * std::max(1.0, std::abs(before))) {
      throw ContractViolation(std::string("incremental objective increased during ") + stage + " at t = " +
                              std::to_string(t) + ": " + std::to_string(before) + " -> " +
                              std::to_string(after));
    }
  };

  PhaseField z = z_start;
  double objective = objective_of(y, z);
  std::string status = "ok";
  const auto note_elastic = [&](const MinimizerResult& res) {
    if (res.status != MinimizerStatus::converged && status == "ok") {
      status = std::string(minimizer_status_name(res.status));
    }
  };

  int sweeps = 0;
  const auto alternate = [&]() {
    for (int local = 1;; ++local) {
      ++sweeps;
      const MinimizerResult res = relax(t, z, y);
      note_elastic(res);
      y = res.positions;
      const double after_elastic = objective_of(y, z);
      check_descent(objective, after_elastic, "the elastic solve");

      PhaseField z_new = solve_phase(assemble_phase_problem(mesh_, material_, y, z_prev, beta));
      const double after_phase = objective_of(y, z_new);
      check_descent(after_elastic, after_phase, "the phase solve");

      const bool changed = z_new != z;
      const double decrease = objective - after_phase;
      z = std::move(z_new);
      objective = after_phase;
      if (!changed) return;
      const bool small = decrease < opts.sweep_rel_tol * std::max(1.0, std::abs(objective));
      if (small || local >= opts.max_sweeps) {
        // Leave y stationary for the final phase field.
        const MinimizerResult last = relax(t, z, y);
        note_elastic(last);
        const double after_last = objective_of(last.positions, z);
        check_descent(objective, after_last, "the final elastic solve");
        y = last.positions;
        objective = after_last;
        if (!small && status == "ok") status = "max_sweeps";
        return;
      }
    }
  };

  alternate();
  while (search_competitors) {
    // Best single flip or uniform field, each with y re-minimized from the
    // current iterate; the same competitors the stability check uses.
    const double threshold = opts.competitor_gain * std::max(1.0, std::abs(objective));
    double best = objective - threshold;
    std::optional<State> winner;
    const auto consider = [&](PhaseField candidate) {
      if (candidate == z) return;
      const MinimizerResult res = relax(t, candidate, y);
      const double value = objective_of(res.positions, candidate);
      if (value < best) {
        best = value;
        winner = State{res.positions, std::move(candidate)};
      }
    };
    for (int tri = 0; tri < mesh_.num_triangles(); ++tri) {
      PhaseField candidate = z;
      candidate[tri] ^= 1;
      consider(std::move(candidate));
    }
    consider(PhaseField(z.size(), 0));
    consider(PhaseField(z.size(), 1));
    if (!winner) break;
    y = std::move(winner->y);
    z = std::move(winner->z);
    objective = best;
    alternate();
  }

  if (row) {
    row->sweeps = sweeps;
    row->status = status;
  }
  return State{std::move(y), std::move(z)};
}

State Simulation::initial_state(LedgerRow* row) const {
  const double t0 = setup_.load.time(0);
  Positions y = reference_positions(mesh_);
  for (int n = 0; n < mesh_.num_nodes(); ++n) y.col(n) += setup_.load.displacement(t0, mesh_.nodes()[n]);
  constraints_at(t0).impose(y);
  const PhaseField z0 = initial_phase();
  LedgerRow info;
  State state = solve_increment(t0, std::move(y), z0, z0, 0.0, false, &info);
  if (row) {
    *row = make_row(0, state, state.z, 0.0);
    row->sweeps = info.sweeps;
    row->status = info.status;
  }
  return state;
}

Positions Simulation::imposed_start(int k, const Positions& previous) const {
  const double t = setup_.load.time(k);
  Positions y = previous;
  const ConstraintMap map = constraints_at(t);
  map.impose(y);
  if (min_jacobian(mesh_, y) > 0.0) return y;
  // Moving only the boundary inverted an element; carry the interior along
  // with the increment of the (affine) boundary rule.
  const double t_prev = setup_.load.time(k - 1);
  y = previous;
  for (int n = 0; n < mesh_.num_nodes(); ++n) {
    const Vec2& x = mesh_.nodes()[n];
    y.col(n) += setup_.load.displacement(t, x) - setup_.load.displacement(t_prev, x);
  }
  map.impose(y);
  if (!(min_jacobian(mesh_, y) > 0.0)) {
    throw std::runtime_error("cannot impose boundary values of step " + std::to_string(k) +
                             " without inverting an element");
  }
  return y;
}

LedgerRow Simulation::make_row(int k, const State& state, const PhaseField& previous, double cumulative) const {
  LedgerRow row;
  row.k = k;
  row.t = setup_.load.time(k);
  row.a = setup_.load.amplitude(row.t);
  const StoredEnergy e = energy(state);
  row.bulk = e.bulk;
  row.interface_constant = e.interface_constant;
  row.interface_surface = e.interface_surface;
  row.dissipation_increment = dissipation_distance(mesh_, setup_.material.beta, state.z, previous);
  row.dissipation_cumulative = cumulative + row.dissipation_increment;
  row.fraction_first = fraction_first(mesh_, state.z);
  for (std::size_t t = 0; t < state.z.size(); ++t) row.flips += state.z[t] != previous[t];
  return row;
}

State Simulation::step(int k, const State& previous, LedgerRow* row) const {
  const double t = setup_.load.time(k);
  Positions start = imposed_start(k, previous.y);
  LedgerRow info;
  State next = solve_increment(t, std::move(start), previous.z, previous.z, setup_.material.beta,
                               setup_.solver.competitor_search, &info);
  if (row) {
    *row = make_row(k, next, previous.z, 0.0);
    row->sweeps = info.sweeps;
    row->status = info.status;
  }
  return next;
}

Trajectory Simulation::run(const StepCallback& on_step) const {
  Trajectory traj;
  traj.states.reserve(static_cast<std::size_t>(setup_.load.n_steps + 1));
  LedgerRow first;
  traj.states.push_back(initial_state(&first));
  traj.ledger.push_back(first);
  if (on_step) on_step(0, traj.states[0], traj.ledger[0]);
  for (int k = 1; k <= setup_.load.n_steps; ++k) {
    LedgerRow row;
    State next = step(k, traj.states.back(), &row);
    row.dissipation_cumulative = traj.ledger.back().dissipation_cumulative + row.dissipation_increment;
    traj.states.push_back(std::move(next));
    traj.ledger.push_back(row);
    if (on_step) on_step(k, traj.states.back(), traj.ledger.back());
  }
  traj.complete = true;
  return traj;
}

StabilityReport stability_diagnostic(const Simulation& sim, int k, const State& state,
                                     const StabilityOptions& options) {
  StabilityReport report;
  report.k = k;
  const Mesh2D& mesh = sim.mesh();
  const double t = sim.setup().load.time(k);
  const double beta = sim.setup().material.beta;
  const double reference = sim.energy(state).total();

  const auto consider = [&](const std::string& label, const PhaseField& z) {
    const MinimizerResult res = sim.relax(t, z, state.y);
    const double competitor = sim.energy(State{res.positions, z}).total();
    const double gap = reference - (competitor + dissipation_distance(mesh, beta, state.z, z));
    ++report.competitors;
    report.worst_gap = std::max(report.worst_gap, gap);
    if (gap > options.tolerance) report.violations.push_back({label, gap});
  };

  // The state itself is a competitor with gap exactly zero.
  ++report.competitors;
  if (options.single_flips) {
    for (int tri = 0; tri < mesh.num_triangles(); ++tri) {
      PhaseField z = state.z;
      z[tri] ^= 1;
      consider("flip " + std::to_string(tri), z);
    }
  }
  if (options.uniform) {
    consider("uniform 0", PhaseField(state.z.size(), 0));
    consider("uniform 1", PhaseField(state.z.size(), 1));
  }
  return report;
}

std::vector<BalanceRow> energy_balance_report(const Simulation& sim, const Trajectory& trajectory,
                                              double tolerance) {
  std::vector<BalanceRow> rows;
  if (trajectory.states.empty()) return rows;
  const Mesh2D& mesh = sim.mesh();
  const double beta = sim.setup().material.beta;
  const double e0 = sim.energy(trajectory.states[0]).total();
  rows.push_back({0, e0, e0, 0.0, 0.0, true, 0.0, 0.0});

  double work = 0.0;
  double diss = 0.0;
  double previous_energy = e0;
  for (std::size_t k = 1; k < trajectory.states.size(); ++k) {
    const State& prev = trajectory.states[k - 1];
    const State& cur = trajectory.states[k];
    BalanceRow row;
    row.k = static_cast<int>(k);
    row.energy = sim.energy(cur).total();
    row.start_energy = sim.energy(State{sim.imposed_start(row.k, prev.y), prev.z}).total();
    row.dissipation = dissipation_distance(mesh, beta, cur.z, prev.z);
    row.upper_slack = row.start_energy - (row.energy + row.dissipation);
    row.upper_ok = row.upper_slack >= -tolerance;
    row.work = row.start_energy - previous_energy;
    work += row.work;
    diss += row.dissipation;
    row.residual = row.energy + diss - e0 - work;
    rows.push_back(row);
    previous_energy = row.energy;
  }
  return rows;
}

}  // namespace smamicro
