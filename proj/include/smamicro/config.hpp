#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smamicro/driver.hpp"

namespace smamicro {

/// Bad configuration input. `where()` names the file line or flag.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& message)
      : std::runtime_error(where.empty() ? message : where + ": " + message), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct RunConfig {
  Preset preset = Preset::example1;
  int nx = 16;
  int ny = 8;
  MaterialParams material;
  double t_final = 16.0;
  int n_steps = 16;
  std::vector<WaveKnot> knots = triangular_wave_knots();
  BoundaryKind boundary = BoundaryKind::clamped;
  double load_scale = 0.3;
  InitialPhase initial_phase = InitialPhase::random;
  std::uint64_t seed = 20180901;
  double elastic_tol = 1e-6;
  int elastic_max_iterations = 2000;
  double sweep_rel_tol = 1e-8;
  int max_sweeps = 50;
  bool competitor_search = false;
  std::string output = "run";
  bool emit_snapshots = true;
  bool run_diagnostics = false;

  static RunConfig for_preset(Preset preset);

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
  SimulationSetup to_setup() const;

  bool operator==(const RunConfig&) const = default;
};

/// One `key = value` assignment. Keys are written `section.key`; origin is
/// a "file:line" or "--flag" label used in error messages.
struct ConfigEntry {
  std::string key;
  std::string value;
  std::string origin;
};

/// Splits INI-style text into entries. Blank lines and lines starting with
/// '#' or ';' are skipped. Sections listed in `skip_sections` are ignored.
std::vector<ConfigEntry> read_config_entries(std::string_view text, const std::string& source,
                                             const std::vector<std::string>& skip_sections = {});

/// Builds a validated config: preset defaults first (preset taken from the
/// last entry naming one), then every entry in order. Unknown keys throw.
RunConfig build_config(const std::vector<ConfigEntry>& entries);

RunConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
RunConfig parse_config_file(const std::string& path);

/// Canonical text form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

/// All recognised keys in `section.key` form.
const std::vector<std::string>& config_keys();

std::string format_knots(const std::vector<WaveKnot>& knots);
std::vector<WaveKnot> parse_knots(std::string_view text);

std::string_view initial_phase_name(InitialPhase phase);
InitialPhase parse_initial_phase(std::string_view name);

}  // namespace smamicro
