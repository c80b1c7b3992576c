#include "smamicro/run_io.hpp"

#include <cstdio>
#include <fstream>
#include <optional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace smamicro {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* exit_label(ExitCode code) {
  switch (code) {
    case ExitCode::ok: return "ok";
    case ExitCode::config_error: return "config_error";
    case ExitCode::solver_stall: return "solver_stall";
    case ExitCode::contract_violation: return "contract_violation";
    case ExitCode::io_error: return "io_error";
    case ExitCode::diagnostics_failed: return "diagnostics_failed";
  }
  return "unknown";
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot rename " + tmp.string() + " to " + path.string());
  }
}

std::string format_ledger(const std::vector<LedgerRow>& rows) {
  std::string out = "k,t,a,E_bulk,E_int1,E_int2,D_inc,Diss_cum,frac_z1,flips,sweeps,status\n";
  for (const LedgerRow& r : rows) {
    out += std::to_string(r.k) + ',' + num(r.t) + ',' + num(r.a) + ',' + num(r.bulk) + ',' +
           num(r.interface_constant) + ',' + num(r.interface_surface) + ',' + num(r.dissipation_increment) + ',' +
           num(r.dissipation_cumulative) + ',' + num(r.fraction_first) + ',' + std::to_string(r.flips) + ',' +
           std::to_string(r.sweeps) + ',' + r.status + '\n';
  }
  return out;
}

std::string format_mesh(const Mesh2D& mesh, const NodeSets& sets) {
  std::ostringstream out;
  out << "# mesh " << mesh.nx() << ' ' << mesh.ny() << ' ' << num(mesh.width()) << ' ' << num(mesh.height())
      << '\n';
  mesh.write_tables(out);
  out << "# dirichlet " << sets.dirichlet.size() << '\n';
  for (int n : sets.dirichlet) out << n << '\n';
  out << "# periodic " << sets.periodic.size() << "\n# master slave\n";
  for (const PeriodicPair& p : sets.periodic) out << p.master << ' ' << p.slave << '\n';
  return out.str();
}

std::string format_snapshot(const Mesh2D& mesh, const LedgerRow& row, const State& state, std::uint64_t seed) {
  std::string out;
  out += "k " + std::to_string(row.k) + '\n';
  out += "t " + num(row.t) + '\n';
  out += "a " + num(row.a) + '\n';
  out += "seed " + std::to_string(seed) + '\n';
  out += "nodes " + std::to_string(mesh.num_nodes()) + "\n# id X1 X2 x1 x2\n";
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const Vec2& x = mesh.nodes()[n];
    out += std::to_string(n) + ' ' + num(x.x()) + ' ' + num(x.y()) + ' ' + num(state.y(0, n)) + ' ' +
           num(state.y(1, n)) + '\n';
  }
  out += "triangles " + std::to_string(mesh.num_triangles()) + "\n# id z\n";
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    out += std::to_string(t) + ' ' + std::to_string(int(state.z[t])) + '\n';
  }
  return out;
}

std::string format_manifest(const RunConfig& config, const Mesh2D& mesh, const RunSummary& summary) {
  std::ostringstream out;
  out << serialize_config(config) << "\n[result]\n"
      << "nodes = " << mesh.num_nodes() << '\n'
      << "triangles = " << mesh.num_triangles() << '\n'
      << "interior_edges = " << mesh.interior_edges().size() << '\n'
      << "steps_completed = " << summary.steps_completed << '\n'
      << "partial = " << (summary.partial ? "true" : "false") << '\n'
      << "exit_status = " << exit_label(summary.code) << '\n';
  if (!summary.message.empty()) {
    std::string message = summary.message;
    for (char& c : message) {
      if (c == '\n') c = ' ';
    }
    out << "message = " << message << '\n';
  }
  return out.str();
}

Snapshot parse_snapshot(std::istream& in, const std::string& source) {
  const auto fail = [&](const std::string& what) { throw std::runtime_error(source + ": " + what); };
  const auto next_line = [&](std::string& line) {
    while (std::getline(in, line)) {
      if (!line.empty() && line[0] != '#') return true;
    }
    return false;
  };
  Snapshot snap;
  std::string line;
  const auto header = [&](const char* name) {
    if (!next_line(line)) fail(std::string("missing '") + name + "' line");
    std::istringstream ls(line);
    std::string key;
    std::string value;
    ls >> key >> value;
    if (key != name || value.empty()) fail(std::string("expected '") + name + "', got '" + line + "'");
    return value;
  };
  snap.k = std::stoi(header("k"));
  snap.t = std::stod(header("t"));
  snap.a = std::stod(header("a"));
  header("seed");
  const int nodes = std::stoi(header("nodes"));
  snap.state.y.resize(2, nodes);
  for (int n = 0; n < nodes; ++n) {
    if (!next_line(line)) fail("truncated node table");
    std::istringstream ls(line);
    int id = -1;
    double X1, X2, x1, x2;
    if (!(ls >> id >> X1 >> X2 >> x1 >> x2) || id != n) fail("bad node row '" + line + "'");
    snap.state.y(0, n) = x1;
    snap.state.y(1, n) = x2;
  }
  const int triangles = std::stoi(header("triangles"));
  snap.state.z.resize(static_cast<std::size_t>(triangles));
  for (int t = 0; t < triangles; ++t) {
    if (!next_line(line)) fail("truncated triangle table");
    std::istringstream ls(line);
    int id = -1;
    int z = -1;
    if (!(ls >> id >> z) || id != t || (z != 0 && z != 1)) fail("bad triangle row '" + line + "'");
    snap.state.z[t] = static_cast<std::uint8_t>(z);
  }
  return snap;
}

Snapshot read_snapshot(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return parse_snapshot(in, path.string());
}

RunConfig read_manifest(const fs::path& path) {
  return build_config(read_config_entries(read_text(path), path.string(), {"result"}));
}

fs::path snapshot_path(const fs::path& dir, int k) {
  char name[32];
  std::snprintf(name, sizeof(name), "step_%03d.txt", k);
  return dir / "snapshots" / name;
}

void emit_outputs(const fs::path& dir, const RunConfig& config, const Simulation& sim, const Trajectory& trajectory,
                  const RunSummary& summary) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  if (config.emit_snapshots) {
    fs::create_directories(dir / "snapshots", ec);
    if (ec) throw std::runtime_error("cannot create " + (dir / "snapshots").string() + ": " + ec.message());
    for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
      write_file_atomic(snapshot_path(dir, static_cast<int>(k)),
                        format_snapshot(sim.mesh(), trajectory.ledger[k], trajectory.states[k], config.seed));
    }
  }
  write_file_atomic(dir / "mesh.txt", format_mesh(sim.mesh(), sim.node_sets()));
  write_file_atomic(dir / "ledger.csv", format_ledger(trajectory.ledger));
  // Manifest last: its presence marks a finished write.
  write_file_atomic(dir / "manifest.txt", format_manifest(config, sim.mesh(), summary));
}

std::vector<DiagnosticRow> diagnose_trajectory(const Simulation& sim, const Trajectory& trajectory,
                                               const StabilityOptions& options) {
  const std::vector<BalanceRow> balance = energy_balance_report(sim, trajectory);
  std::vector<DiagnosticRow> rows;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    DiagnosticRow row;
    row.k = static_cast<int>(k);
    row.stability = stability_diagnostic(sim, row.k, trajectory.states[k], options);
    row.balance = balance[k];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_diagnostics(const std::vector<DiagnosticRow>& rows) {
  std::string out = "k,competitors,violations,worst_gap,worst_competitor,upper_slack,upper_ok,work,residual\n";
  for (const DiagnosticRow& r : rows) {
    std::string worst = "-";
    double gap = -1.0;
    for (const StabilityViolation& v : r.stability.violations) {
      if (v.gap > gap) {
        gap = v.gap;
        worst = v.competitor;
      }
    }
    out += std::to_string(r.k) + ',' + std::to_string(r.stability.competitors) + ',' +
           std::to_string(r.stability.violations.size()) + ',' + num(r.stability.worst_gap) + ',' + worst + ',' +
           num(r.balance.upper_slack) + ',' + (r.balance.upper_ok ? "true" : "false") + ',' + num(r.balance.work) +
           ',' + num(r.balance.residual) + '\n';
  }
  return out;
}

bool diagnostics_clean(const std::vector<DiagnosticRow>& rows) {
  for (const DiagnosticRow& r : rows) {
    if (!r.stability.violations.empty() || !r.balance.upper_ok) return false;
  }
  return true;
}

ExitCode run_to_directory(const RunConfig& config, std::ostream& log) {
  std::optional<Simulation> sim;
  try {
    config.validate();
    sim.emplace(config.to_setup());
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  }

  Trajectory traj;
  RunSummary summary;
  try {
    sim->run([&](int k, const State& state, const LedgerRow& row) {
      traj.states.push_back(state);
      traj.ledger.push_back(row);
      log << "step " << k << "  t=" << row.t << "  frac_z1=" << std::fixed << std::setprecision(4)
          << row.fraction_first << std::defaultfloat << std::setprecision(6) << "  flips=" << row.flips
          << "  sweeps=" << row.sweeps << "  " << row.status << '\n';
    });
    traj.complete = true;
  } catch (const ContractViolation& e) {
    summary.code = ExitCode::contract_violation;
    summary.message = e.what();
  } catch (const std::exception& e) {
    summary.code = ExitCode::solver_stall;
    summary.message = e.what();
  }
  summary.steps_completed = static_cast<int>(traj.states.size());
  summary.partial = !traj.complete;
  if (summary.code == ExitCode::ok) {
    for (const LedgerRow& row : traj.ledger) {
      if (row.status != "ok") {
        summary.code = ExitCode::solver_stall;
        summary.message = "step " + std::to_string(row.k) + " ended with status " + row.status;
        break;
      }
    }
  }
  if (!summary.message.empty()) log << exit_label(summary.code) << ": " << summary.message << '\n';

  const fs::path dir = config.output;
  try {
    emit_outputs(dir, config, *sim, traj, summary);
    if (config.run_diagnostics && !traj.states.empty()) {
      const auto rows = diagnose_trajectory(*sim, traj);
      write_file_atomic(dir / "diagnostics.csv", format_diagnostics(rows));
      log << "diagnostics: " << (diagnostics_clean(rows) ? "clean" : "violations found")
          << " (see diagnostics.csv)\n";
    }
  } catch (const std::exception& e) {
    log << "io error: " << e.what() << '\n';
    return ExitCode::io_error;
  }
  log << "wrote " << dir.string() << '\n';
  return summary.code;
}

ExitCode diagnose_directory(const fs::path& run_dir, std::ostream& log, const fs::path& report_dir) {
  RunConfig config;
  try {
    config = read_manifest(run_dir / "manifest.txt");
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return ExitCode::config_error;
  } catch (const std::exception& e) {
    log << "io error: " << e.what() << '\n';
    return ExitCode::io_error;
  }
  const Simulation sim(config.to_setup());

  Trajectory traj;
  try {
    for (int k = 0; k <= config.n_steps; ++k) {
      const fs::path path = snapshot_path(run_dir, k);
      if (!fs::exists(path)) break;
      Snapshot snap = read_snapshot(path);
      if (snap.k != k || snap.state.y.cols() != sim.mesh().num_nodes() ||
          static_cast<int>(snap.state.z.size()) != sim.mesh().num_triangles()) {
        throw std::runtime_error(path.string() + " does not match the manifest mesh");
      }
      const PhaseField& previous = traj.states.empty() ? snap.state.z : traj.states.back().z;
      const double cumulative = traj.ledger.empty() ? 0.0 : traj.ledger.back().dissipation_cumulative;
      traj.ledger.push_back(sim.make_row(k, snap.state, previous, cumulative));
      traj.states.push_back(std::move(snap.state));
    }
  } catch (const std::exception& e) {
    log << "io error: " << e.what() << '\n';
    return ExitCode::io_error;
  }
  if (traj.states.empty()) {
    log << "io error: no snapshots in " << (run_dir / "snapshots").string() << '\n';
    return ExitCode::io_error;
  }
  traj.complete = static_cast<int>(traj.states.size()) == config.n_steps + 1;

  const auto rows = diagnose_trajectory(sim, traj);
  for (const DiagnosticRow& r : rows) {
    log << "k=" << r.k << "  stability: " << r.stability.violations.size() << '/' << r.stability.competitors
        << " violated (worst gap " << r.stability.worst_gap << ")  upper estimate: "
        << (r.balance.upper_ok ? "ok" : "VIOLATED") << " (slack " << r.balance.upper_slack
        << ")  balance residual " << r.balance.residual << '\n';
  }
  if (!report_dir.empty()) {
    try {
      write_file_atomic(report_dir / "diagnostics.csv", format_diagnostics(rows));
    } catch (const std::exception& e) {
      log << "io error: " << e.what() << '\n';
      return ExitCode::io_error;
    }
  }
  const bool clean = diagnostics_clean(rows);
  log << (clean ? "diagnostics clean" : "diagnostics found violations") << '\n';
  return clean ? ExitCode::ok : ExitCode::diagnostics_failed;
}

}  // namespace smamicro
