#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smamicro/config.hpp"
#include "smamicro/driver.hpp"

namespace smamicro {

enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  solver_stall = 3,
  contract_violation = 4,
  io_error = 5,
  diagnostics_failed = 6,
};

struct RunSummary {
  int steps_completed = 0;  ///< number of states written (k = 0..steps_completed-1)
  bool partial = false;
  ExitCode code = ExitCode::ok;
  std::string message;
};

/// Writes `content` to a sibling temporary file and renames it over `path`.
/// Throws std::runtime_error on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string format_ledger(const std::vector<LedgerRow>& rows);
std::string format_mesh(const Mesh2D& mesh, const NodeSets& sets);
std::string format_snapshot(const Mesh2D& mesh, const LedgerRow& row, const State& state, std::uint64_t seed);
std::string format_manifest(const RunConfig& config, const Mesh2D& mesh, const RunSummary& summary);

struct Snapshot {
  int k = 0;
  double t = 0.0;
  double a = 0.0;
  State state;
};

Snapshot parse_snapshot(std::istream& in, const std::string& source);
Snapshot read_snapshot(const std::filesystem::path& path);
/// The config section of a manifest; run status lines are skipped.
RunConfig read_manifest(const std::filesystem::path& path);

std::filesystem::path snapshot_path(const std::filesystem::path& dir, int k);

/// Manifest, ledger.csv, mesh.txt and (optionally) snapshots/step_XXX.txt.
void emit_outputs(const std::filesystem::path& dir, const RunConfig& config, const Simulation& sim,
                  const Trajectory& trajectory, const RunSummary& summary);

/// Runs the configured simulation, writes outputs and returns the exit code.
/// Progress lines go to `log`.
ExitCode run_to_directory(const RunConfig& config, std::ostream& log);

struct DiagnosticRow {
  int k = 0;
  StabilityReport stability;
  BalanceRow balance;
};

std::vector<DiagnosticRow> diagnose_trajectory(const Simulation& sim, const Trajectory& trajectory,
                                               const StabilityOptions& options = {});
std::string format_diagnostics(const std::vector<DiagnosticRow>& rows);
bool diagnostics_clean(const std::vector<DiagnosticRow>& rows);

/// Reloads a run directory and replays the stability and balance checks.
/// Writes diagnostics.csv into `report_dir` when it is non-empty.
ExitCode diagnose_directory(const std::filesystem::path& run_dir, std::ostream& log,
                            const std::filesystem::path& report_dir = {});

}  // namespace smamicro
