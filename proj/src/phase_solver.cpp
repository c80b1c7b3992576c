#include "smamicro/phase_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "smamicro/lp_simplex.hpp"
#include "smamicro/max_flow.hpp"

namespace smamicro {

bool PhaseProblem::decoupled() const {
  return std::all_of(pairwise.begin(), pairwise.end(),
                     [](const PairwiseTerm& p) { return p.weight == 0.0; });
}

void PhaseProblem::validate() const {
  const int n = size();
  if (static_cast<int>(previous.size()) != n) {
    throw std::invalid_argument("phase problem: previous field has " + std::to_string(previous.size()) +
                                " entries, expected " + std::to_string(n));
  }
  for (double u : unary) {
    if (!std::isfinite(u)) throw std::invalid_argument("phase problem: non-finite unary coefficient");
  }
  for (auto z : previous) {
    if (z > 1) throw std::invalid_argument("phase problem: previous field is not binary");
  }
  for (const PairwiseTerm& p : pairwise) {
    if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n || p.first == p.second) {
      throw std::invalid_argument("phase problem: pairwise term with invalid triangle index");
    }
    if (!std::isfinite(p.weight) || p.weight < 0.0) {
      throw std::invalid_argument("phase problem: pairwise weights must be finite and >= 0 (submodular)");
    }
  }
}

double phase_objective(const PhaseProblem& problem, const PhaseField& z) {
  double value = 0.0;
  for (int t = 0; t < problem.size(); ++t) {
    if (z[t]) value += problem.unary[t];
  }
  for (const PairwiseTerm& p : problem.pairwise) {
    if (z[p.first] != z[p.second]) value += p.weight;
  }
  return value;
}

PhaseField solve_decoupled(const PhaseProblem& problem) {
  problem.validate();
  if (!problem.decoupled()) {
    throw CoupledProblemError("nonzero interfacial weights: use the coupled phase solver");
  }
  PhaseField z(problem.previous);
  for (int t = 0; t < problem.size(); ++t) {
    if (problem.unary[t] > 0.0) z[t] = 0;
    else if (problem.unary[t] < 0.0) z[t] = 1;
  }
  return z;
}

PhaseField solve_coupled(const PhaseProblem& problem) {
  problem.validate();
  const int n = problem.size();
  const int source = n;
  const int sink = n + 1;

  // Source side of the cut is z = 0.
  double scale = 0.0;
  for (double u : problem.unary) scale = std::max(scale, std::abs(u));
  for (const PairwiseTerm& p : problem.pairwise) scale = std::max(scale, p.weight);
  MaxFlow<double> flow(n + 2, 1e-14 * scale);
  for (int t = 0; t < n; ++t) {
    const double u = problem.unary[t];
    if (u > 0.0) flow.add_arc(source, t, u);
    else if (u < 0.0) flow.add_arc(t, sink, -u);
  }
  for (const PairwiseTerm& p : problem.pairwise) {
    if (p.weight > 0.0) flow.add_arc(p.first, p.second, p.weight, p.weight);
  }
  flow.solve(source, sink);

  // Every minimum cut is a source set closed under residual arcs. Pick the
  // closed set nearest to the previous field with a second, integral cut.
  constexpr std::int64_t kForced = std::int64_t{1} << 40;
  MaxFlow<std::int64_t> closest(n + 2);
  for (int v = 0; v < n + 2; ++v) {
    for (const auto& arc : flow.arcs_from(v)) {
      if (flow.has_residual(arc)) closest.add_arc(v, arc.to, kForced);
    }
  }
  for (int t = 0; t < n; ++t) {
    if (problem.previous[t] == 0) closest.add_arc(source, t, 1);
    else closest.add_arc(t, sink, 1);
  }
  closest.solve(source, sink);
  const std::vector<bool> side = closest.source_side(source);

  PhaseField z(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) z[t] = side[t] ? 0 : 1;
  return z;
}

PhaseField solve_phase(const PhaseProblem& problem) {
  return problem.decoupled() ? solve_decoupled(problem) : solve_coupled(problem);
}

LpRelaxationReport lp_relaxation_check(const PhaseProblem& problem, const PhaseField& z,
                                       double gap_tolerance) {
  problem.validate();
  if (static_cast<int>(z.size()) != problem.size()) {
    throw std::invalid_argument("lp check: candidate has wrong size");
  }
  const int n = problem.size();
  const int m = static_cast<int>(problem.pairwise.size());
  const int rows = 2 * m + n;

  Eigen::VectorXd c(n + m);
  for (int t = 0; t < n; ++t) c[t] = problem.unary[t];
  for (int e = 0; e < m; ++e) c[n + e] = problem.pairwise[e].weight;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(rows, n + m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
  for (int e = 0; e < m; ++e) {
    const auto& p = problem.pairwise[e];
    a(2 * e, p.first) = 1.0;
    a(2 * e, p.second) = -1.0;
    a(2 * e, n + e) = -1.0;
    a(2 * e + 1, p.first) = -1.0;
    a(2 * e + 1, p.second) = 1.0;
    a(2 * e + 1, n + e) = -1.0;
  }
  for (int t = 0; t < n; ++t) {
    a(2 * m + t, t) = 1.0;
    b[2 * m + t] = 1.0;
  }

  const LpSolution lp = solve_lp_slack_feasible(c, a, b);
  if (lp.status != LpStatus::optimal) {
    throw std::logic_error("lp check: relaxation did not reach optimality");
  }

  LpRelaxationReport report;
  report.candidate_objective = phase_objective(problem, z);
  report.lp_objective = lp.objective;
  report.dual_bound = lp.dual_objective;
  report.dual_infeasibility = lp.dual_infeasibility;
  report.duality_gap = report.candidate_objective - report.dual_bound;
  report.candidate_optimal =
      report.duality_gap <= gap_tolerance && report.dual_infeasibility <= gap_tolerance;
  report.lp_z.assign(lp.x.data(), lp.x.data() + n);
  report.lp_sigma.assign(lp.x.data() + n, lp.x.data() + n + m);

  constexpr double kIntTol = 1e-9;
  const auto binary = [](double v) { return std::abs(v) <= kIntTol || std::abs(v - 1.0) <= kIntTol; };
  report.lp_integral = std::all_of(lp.x.data(), lp.x.data() + n + m, binary);
  report.sigma_identity = true;
  for (int e = 0; e < m; ++e) {
    const auto& p = problem.pairwise[e];
    const double jump = std::abs(report.lp_z[p.first] - report.lp_z[p.second]);
    if (std::abs(report.lp_sigma[e] - jump) > kIntTol) report.sigma_identity = false;
  }
  return report;
}

}  // namespace smamicro
