// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>

#include "smamicro/driver.hpp"
#include "smamicro/run_io.hpp"

using namespace smamicro;

namespace {

int failures = 0;

void report(bool ok, const char* name, const std::string& detail) {
  std::printf("%s  %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

struct Run {
  SimulationSetup setup;
  Trajectory trajectory;
  double seconds = 0.0;
};

Run simulate(SimulationSetup setup) {
  const auto start = std::chrono::steady_clock::now();
  const Simulation sim(setup);
  Run run{setup, sim.run(), 0.0};
  run.seconds = seconds_since(start);
  return run;
}

double dominant(double fraction_first) { return std::max(fraction_first, 1.0 - fraction_first); }

int step_at(const SimulationSetup& s, double t) {
  return static_cast<int>(std::lround(t * s.load.n_steps / s.load.t_final));
}

void well_calibration() {
  const Material m{MaterialParams{}};
  const double w1 = *variant_density(m.stretch(Variant::first), Variant::first, m);
  const double w2 = *variant_density(m.stretch(Variant::second), Variant::second, m);
  const double g1 = variant_density_gradient(m.stretch(Variant::first), Variant::first, m)->norm();
  const double g2 = variant_density_gradient(m.stretch(Variant::second), Variant::second, m)->norm();
  report(w1 == 3.0 && w2 == 3.0 && g1 <= 1e-10 && g2 <= 1e-10, "well calibration",
         fmt("W1(F1)=%.17g W2(F2)=%.17g |grad|=%.3g,%.3g", w1, w2, g1, g2));
}

void gradient_correctness() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> jitter(-0.04, 0.04);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    MaterialParams p;
    p.alpha_i = 0.003;
    p.alpha_s = 0.05;
    const Material material(p);
    const Mesh2D mesh = Mesh2D::structured(4, 2);
    ConstraintMap map(mesh, mesh.classify_boundary(trial % 2 ? BoundaryKind::clamped : BoundaryKind::sheared_ribbon));
    PhaseField z(mesh.num_triangles());
    for (auto& v : z) v = static_cast<std::uint8_t>(rng() & 1);
    const ElasticObjective objective(mesh, material, z, map);
    Positions y = reference_positions(mesh);
    for (int n = 0; n < mesh.num_nodes(); ++n) y.col(n) += Vec2(jitter(rng), jitter(rng));
    map.impose(y);
    const Eigen::VectorXd x = map.reduce(y);
    Eigen::VectorXd g;
    if (!objective.evaluate(x, &g)) {
      worst = std::numeric_limits<double>::infinity();
      continue;
    }
    Eigen::VectorXd fd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += 1e-6;
      xm[i] -= 1e-6;
      fd[i] = (*objective.evaluate(xp, nullptr) - *objective.evaluate(xm, nullptr)) / 2e-6;
    }
    worst = std::max(worst, (g - fd).norm() / std::max(1.0, g.norm()));
  }
  report(worst <= 1e-6, "gradient correctness", fmt("worst relative error %.3g over 100 states", worst));
}

PhaseProblem random_problem(std::mt19937_64& rng, double coupling) {
  static const std::pair<int, int> shapes[] = {{1, 1}, {2, 1}, {2, 2}, {3, 2}, {4, 2}, {2, 4}, {8, 1}};
  const auto [nx, ny] = shapes[rng() % std::size(shapes)];
  const Mesh2D mesh = Mesh2D::structured(nx, ny);
  std::uniform_int_distribution<int> ticks(-256, 256);
  PhaseProblem p;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    p.unary.push_back(ticks(rng) / 256.0);
    p.previous.push_back(static_cast<std::uint8_t>(rng() & 1));
  }
  for (const InteriorEdge& e : mesh.interior_edges()) p.pairwise.push_back({e.plus, e.minus, coupling * std::abs(ticks(rng)) / 256.0});
  return p;
}

void phase_exactness() {
  std::mt19937_64 rng(2);
  int mismatches = 0;
  int sigma_failures = 0;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const PhaseProblem p = random_problem(rng, 1.0);
    const PhaseField z = solve_coupled(p);
    double best = std::numeric_limits<double>::infinity();
    PhaseField c(p.size());
    for (unsigned long mask = 0; mask < (1ul << p.size()); ++mask) {
      for (int i = 0; i < p.size(); ++i) c[i] = (mask >> i) & 1;
      best = std::min(best, phase_objective(p, c));
    }
    mismatches += phase_objective(p, z) != best;
    const LpRelaxationReport lp = lp_relaxation_check(p, z);
    worst_gap = std::max(worst_gap, std::abs(lp.duality_gap));
    sigma_failures += !lp.sigma_identity;
  }
  report(mismatches == 0 && worst_gap <= 1e-9 && sigma_failures == 0, "phase-solver exactness",
         fmt("%g/200 objective mismatches, worst |gap| %.3g, %g sigma failures", mismatches, worst_gap,
             sigma_failures));
}

void closed_form() {
  std::mt19937_64 rng(3);
  int wrong = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const PhaseProblem p = random_problem(rng, 0.0);
    const PhaseField z = solve_coupled(p);
    for (int t = 0; t < p.size(); ++t) {
      const int expected = p.unary[t] > 0 ? 0 : p.unary[t] < 0 ? 1 : p.previous[t];
      wrong += z[t] != expected;
    }
  }
  report(wrong == 0, "closed-form consistency", fmt("%g triangles off the sign rule in 500 instances", wrong));
}

}  // namespace

int main() {
  well_calibration();
  gradient_correctness();
  phase_exactness();
  closed_form();

  SimulationSetup ex1 = SimulationSetup::for_preset(Preset::example1);
  const Run plain = simulate(ex1);
  const int k8 = step_at(ex1, 8);
  const int k16 = step_at(ex1, 16);
  {
    const double d = dominant(plain.trajectory.ledger[k8].fraction_first);
    report(d >= 0.65 && d <= 0.85 && plain.seconds < 300, "example1 alpha_i=0 ratio",
           fmt("dominant fraction %.4f at t=8 (window [0.65, 0.85]), %.1f s", d, plain.seconds));
  }

  SimulationSetup ex1i = ex1;
  ex1i.material.alpha_i = 0.003;
  const Run interfacial = simulate(ex1i);
  {
    const auto& l = interfacial.trajectory.ledger;
    const double d8 = dominant(l[k8].fraction_first);
    const double d16 = dominant(l[k16].fraction_first);
    const bool ok = d8 > 0.9 && d16 > 0.9 && l[k16].interface_constant < l[0].interface_constant &&
                    interfacial.seconds < 600;
    report(ok, "example1 alpha_i=0.003 dominance",
           fmt("dominant %.4f at t=8, %.4f at t=16 (need > 0.9); E_int1 %.5f -> %.5f", d8, d16,
               l[0].interface_constant, l[k16].interface_constant));
  }

  const SimulationSetup ex2 = SimulationSetup::for_preset(Preset::example2);
  const Run ribbon = simulate(ex2);
  {
    const auto& l = ribbon.trajectory.ledger;
    bool growth = true;
    std::string detail = "frac_z1 on (0,4]:";
    for (int k = 1; k <= step_at(ex2, 4); ++k) {
      growth = growth && l[k].fraction_first > l[k - 1].fraction_first;
      detail += fmt(" %.4f", l[k].fraction_first);
    }
    const int unload = step_at(ex2, 8) + 1;
    const bool plateau = l[unload].flips == 0;
    const int k12 = step_at(ex2, 12);
    bool reached = false;
    for (int k = 0; k <= k12; ++k) reached = reached || 1.0 - l[k].fraction_first > 0.9;
    bool frozen = true;
    for (int k = k12 + 1; k <= ex2.load.n_steps; ++k) frozen = frozen && l[k].flips == 0;
    detail += fmt("; flips at t=%g: %g; variant-2 fraction at t=12 %.4f; frozen after t=12: %g",
                  ex2.load.time(unload), l[unload].flips, 1.0 - l[k12].fraction_first, frozen);
    report(growth && plateau && reached && frozen, "example2 event sequence",
           detail + fmt(" [growth %g, plateau %g, reached %g]", growth, plateau, reached));
  }

  SimulationSetup ex1b0 = ex1;
  ex1b0.material.beta = 0.0;
  const Run elastic = simulate(ex1b0);
  {
    bool differ = false;
    for (std::size_t k = 0; k < plain.trajectory.ledger.size(); ++k) {
      differ = differ || plain.trajectory.ledger[k].fraction_first != elastic.trajectory.ledger[k].fraction_first;
    }
    // Variant 1 is favoured during the first loading phase (a > 0).
    const double with = plain.trajectory.ledger[k8].fraction_first;
    const double without = elastic.trajectory.ledger[k8].fraction_first;
    report(differ && with > without, "hysteresis",
           fmt("curves differ: %g; variant-1 fraction at t=8: beta=0.1 %.4f, beta=0 %.4f", differ, with, without));
  }

  {
    int upper_failures = 0;
    int violations = 0;
    int steps = 0;
    double worst = 0.0;
    std::string where;
    for (const Run* run : {&plain, &interfacial, &ribbon}) {
      const Simulation sim(run->setup);
      for (const DiagnosticRow& row : diagnose_trajectory(sim, run->trajectory)) {
        ++steps;
        upper_failures += !row.balance.upper_ok;
        violations += static_cast<int>(row.stability.violations.size());
        if (row.stability.worst_gap > worst) {
          worst = row.stability.worst_gap;
          where = std::string(preset_name(run->setup.preset)) + " alpha_i=" +
                  fmt("%g k=%g", run->setup.material.alpha_i, row.k);
        }
      }
    }
    report(upper_failures == 0 && violations == 0, "incremental minimality",
           fmt("%g steps: %g upper-estimate failures, %g stability violations, worst gap %.3g", steps,
               upper_failures, violations, worst) +
               (where.empty() ? "" : " at " + where));
  }

  {
    const Run again = simulate(ex1);
    const bool same = format_ledger(again.trajectory.ledger) == format_ledger(plain.trajectory.ledger);
    report(same, "determinism", same ? "ledgers byte-identical" : "ledgers differ");
  }

  {
    // Time-step sensitivity, reported only.
    SimulationSetup fine = ex1;
    fine.load.n_steps = 2 * ex1.load.n_steps;
    const Run refined = simulate(fine);
    double worst = 0.0;
    for (int k = 0; k <= ex1.load.n_steps; k += 2) {
      worst = std::max(worst, std::abs(refined.trajectory.ledger[2 * k].fraction_first -
                                       plain.trajectory.ledger[k].fraction_first));
    }
    std::printf("INFO  time-step sensitivity: max |frac_z1(N=32) - frac_z1(N=16)| at t=0,2,...,16 is %.4f\n", worst);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
