#include <cmath>

#include <doctest.h>

#include "smamicro/driver.hpp"
#include "smamicro/run_io.hpp"

using namespace smamicro;

namespace {

SimulationSetup small_setup(Preset preset) {
  SimulationSetup s = SimulationSetup::for_preset(preset);
  s.nx = 8;
  s.ny = 4;
  s.load.n_steps = 8;
  return s;
}

}  // namespace

TEST_CASE("load amplitude and displacement") {
  const LoadProgram load;
  CHECK(load.amplitude(4) == 1.0);
  CHECK(load.amplitude(12) == -1.0);
  CHECK(load.amplitude(10) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(load.amplitude(0) == 0.0);
  CHECK(load.amplitude(16) == 0.0);
  CHECK_THROWS_AS(load.amplitude(16.5), std::out_of_range);
  CHECK(load.time(3) == 3.0);

  const Vec2 u1 = load.displacement(4, Vec2(0, 1));
  CHECK(u1.x() == doctest::Approx(0.15).epsilon(1e-15));
  CHECK(u1.y() == 0.0);
  for (double t : {1.0, 4.0, 9.5, 12.0}) CHECK(load.displacement(t, Vec2(1.3, 0.5)).norm() == 0.0);

  const LoadProgram ribbon = LoadProgram::for_preset(Preset::example2);
  const Vec2 u2 = ribbon.displacement(4, Vec2(2, 0.25));
  CHECK(u2.x() == 0.0);
  CHECK(u2.y() == doctest::Approx(0.8).epsilon(1e-15));

  LoadProgram bad;
  bad.knots = {{0, 0}, {8, 1}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.knots = {{0, 0}, {8, 1}, {8, 0}, {16, 0}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("initial phase fields") {
  const Simulation ribbon(SimulationSetup::for_preset(Preset::example2));
  const PhaseField strips = ribbon.initial_phase();
  for (int t = 0; t < ribbon.mesh().num_triangles(); ++t) {
    CHECK(strips[t] == (ribbon.mesh().layer_of(t) % 2 == 0 ? 1 : 0));
  }
  CHECK(fraction_first(ribbon.mesh(), strips) == 0.5);

  for (std::uint64_t seed : {1ull, 2ull, 20180901ull, 987654321ull}) {
    SimulationSetup s = SimulationSetup::for_preset(Preset::example1);
    s.seed = seed;
    const PhaseField a = Simulation(s).initial_phase();
    CHECK(std::abs(fraction_first(Simulation(s).mesh(), a) - 0.5) < 0.05);
    s.material.alpha_i = 0.003;
    CHECK(Simulation(s).initial_phase() == a);
  }
}

TEST_CASE("zero dissipation with frozen loading is a fixed point") {
  SimulationSetup s = small_setup(Preset::example1);
  s.material.beta = 0.0;
  s.load.knots = {{0, 0.5}, {16, 0.5}};
  const Simulation sim(s);
  const Trajectory traj = sim.run();
  REQUIRE(traj.complete);
  for (std::size_t k = 2; k < traj.states.size(); ++k) {
    CHECK(traj.states[k].z == traj.states[1].z);
    CHECK((traj.states[k].y - traj.states[1].y).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(traj.ledger[k].flips == 0);
  }
  for (const LedgerRow& row : traj.ledger) CHECK(row.dissipation_cumulative == 0.0);
  const auto balance = energy_balance_report(sim, traj);
  for (std::size_t k = 2; k < balance.size(); ++k) {
    CHECK(std::abs(balance[k].residual - balance[1].residual) <= 1e-12);
    CHECK(balance[k].upper_ok);
  }
  CHECK(std::abs(balance[1].residual) <= 1e-10);
}

TEST_CASE("ledger bookkeeping and the upper energy estimate") {
  for (Preset preset : {Preset::example1, Preset::example2}) {
    const Simulation sim(small_setup(preset));
    const Trajectory traj = sim.run();
    REQUIRE(traj.ledger.size() == 9);
    double last = 0.0;
    for (const LedgerRow& row : traj.ledger) {
      CHECK(row.dissipation_cumulative >= last);
      last = row.dissipation_cumulative;
      CHECK(row.fraction_first >= 0.0);
      CHECK(row.fraction_first <= 1.0);
      CHECK(row.status == "ok");
    }
    for (const BalanceRow& b : energy_balance_report(sim, traj)) CHECK(b.upper_ok);
  }
}

TEST_CASE("identical setups give byte-identical ledgers") {
  const auto ledger = [] {
    const Simulation sim(small_setup(Preset::example1));
    return format_ledger(sim.run().ledger);
  };
  CHECK(ledger() == ledger());
}

TEST_CASE("stability diagnostic sanity") {
  SimulationSetup s = small_setup(Preset::example1);
  s.load.n_steps = 2;
  const Simulation sim(s);
  const Trajectory traj = sim.run();
  const StabilityReport report = stability_diagnostic(sim, 1, traj.states[1]);
  CHECK(report.competitors == sim.mesh().num_triangles() + 3);

  s.material.beta = 1e3;
  const Simulation sticky(s);
  const Trajectory held = sticky.run();
  StabilityOptions flips_only;
  flips_only.uniform = false;
  const StabilityReport strict = stability_diagnostic(sticky, 2, held.states[2], flips_only);
  CHECK(strict.violations.empty());
  // Only the self-comparison reaches zero; every flip pays more than it gains.
  CHECK(strict.worst_gap == 0.0);
}

TEST_CASE("phase assembly matches the densities") {
  const Simulation sim(small_setup(Preset::example1));
  const State s0 = sim.initial_state();
  const PhaseProblem p = assemble_phase_problem(sim.mesh(), sim.material(), s0.y, s0.z, 0.1);
  REQUIRE(p.size() == sim.mesh().num_triangles());
  for (int t = 0; t < p.size(); ++t) {
    const Mat2 f = sim.mesh().deformation_gradient(s0.y, t);
    const double diff = *variant_density(f, Variant::first, sim.material()) -
                        *variant_density(f, Variant::second, sim.material());
    CHECK(p.unary[t] == doctest::Approx((diff + 0.1 * dissipation_sign(s0.z[t])) * sim.mesh().areas()[t]));
  }
}
