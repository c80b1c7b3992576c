#include "smamicro/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace smamicro {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double to_double(std::string_view text, const ConfigEntry& e) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError(e.origin, "'" + e.key + "' expects a finite number, got '" + e.value + "'");
  }
  return v;
}

template <class Int>
Int to_integer(const ConfigEntry& e) {
  Int v = 0;
  const std::string_view text = e.value;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError(e.origin, "'" + e.key + "' expects an integer, got '" + e.value + "'");
  }
  return v;
}

bool to_bool(const ConfigEntry& e) {
  if (e.value == "true" || e.value == "1" || e.value == "yes" || e.value == "on") return true;
  if (e.value == "false" || e.value == "0" || e.value == "no" || e.value == "off") return false;
  throw ConfigError(e.origin, "'" + e.key + "' expects true/false, got '" + e.value + "'");
}

template <class F>
auto convert(const ConfigEntry& e, F&& parse) {
  try {
    return parse(e.value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ConfigError(e.origin, "'" + e.key + "': " + ex.what());
  }
}

using Setter = std::function<void(RunConfig&, const ConfigEntry&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"run.preset", [](RunConfig& c, const ConfigEntry& e) {
         c.preset = convert(e, [](const std::string& v) { return parse_preset(v); });
       }},
      {"run.seed", [](RunConfig& c, const ConfigEntry& e) { c.seed = to_integer<std::uint64_t>(e); }},
      {"run.output", [](RunConfig& c, const ConfigEntry& e) {
         if (e.value.empty()) throw ConfigError(e.origin, "'run.output' must not be empty");
         c.output = e.value;
       }},
      {"run.snapshots", [](RunConfig& c, const ConfigEntry& e) { c.emit_snapshots = to_bool(e); }},
      {"run.diagnostics", [](RunConfig& c, const ConfigEntry& e) { c.run_diagnostics = to_bool(e); }},
      {"mesh.nx", [](RunConfig& c, const ConfigEntry& e) { c.nx = to_integer<int>(e); }},
      {"mesh.ny", [](RunConfig& c, const ConfigEntry& e) { c.ny = to_integer<int>(e); }},
      {"material.alpha", [](RunConfig& c, const ConfigEntry& e) { c.material.alpha = to_double(e.value, e); }},
      {"material.delta1", [](RunConfig& c, const ConfigEntry& e) { c.material.delta1 = to_double(e.value, e); }},
      {"material.delta2", [](RunConfig& c, const ConfigEntry& e) { c.material.delta2 = to_double(e.value, e); }},
      {"material.epsilon", [](RunConfig& c, const ConfigEntry& e) { c.material.epsilon = to_double(e.value, e); }},
      {"material.beta", [](RunConfig& c, const ConfigEntry& e) { c.material.beta = to_double(e.value, e); }},
      {"material.alpha_i", [](RunConfig& c, const ConfigEntry& e) { c.material.alpha_i = to_double(e.value, e); }},
      {"material.alpha_s", [](RunConfig& c, const ConfigEntry& e) { c.material.alpha_s = to_double(e.value, e); }},
      {"load.boundary", [](RunConfig& c, const ConfigEntry& e) {
         c.boundary = convert(e, [](const std::string& v) { return parse_boundary_kind(v); });
       }},
      {"load.scale", [](RunConfig& c, const ConfigEntry& e) { c.load_scale = to_double(e.value, e); }},
      {"load.t_final", [](RunConfig& c, const ConfigEntry& e) { c.t_final = to_double(e.value, e); }},
      {"load.n_steps", [](RunConfig& c, const ConfigEntry& e) { c.n_steps = to_integer<int>(e); }},
      {"load.knots", [](RunConfig& c, const ConfigEntry& e) {
         c.knots = convert(e, [](const std::string& v) { return parse_knots(v); });
       }},
      {"load.initial_phase", [](RunConfig& c, const ConfigEntry& e) {
         c.initial_phase = convert(e, [](const std::string& v) { return parse_initial_phase(v); });
       }},
      {"solver.elastic_tol", [](RunConfig& c, const ConfigEntry& e) { c.elastic_tol = to_double(e.value, e); }},
      {"solver.elastic_max_iterations",
       [](RunConfig& c, const ConfigEntry& e) { c.elastic_max_iterations = to_integer<int>(e); }},
      {"solver.sweep_rel_tol", [](RunConfig& c, const ConfigEntry& e) { c.sweep_rel_tol = to_double(e.value, e); }},
      {"solver.max_sweeps", [](RunConfig& c, const ConfigEntry& e) { c.max_sweeps = to_integer<int>(e); }},
      {"solver.competitor_search",
       [](RunConfig& c, const ConfigEntry& e) { c.competitor_search = to_bool(e); }},
  };
  return table;
}

}  // namespace

std::string_view initial_phase_name(InitialPhase phase) {
  return phase == InitialPhase::random ? "random" : "strips";
}

InitialPhase parse_initial_phase(std::string_view name) {
  if (name == "random") return InitialPhase::random;
  if (name == "strips") return InitialPhase::strips;
  throw std::invalid_argument("unknown initial phase '" + std::string(name) + "'");
}

std::string format_knots(const std::vector<WaveKnot>& knots) {
  std::string out;
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (i) out += ", ";
    out += format_double(knots[i].t) + ":" + format_double(knots[i].a);
  }
  return out;
}

std::vector<WaveKnot> parse_knots(std::string_view text) {
  std::vector<WaveKnot> knots;
  while (!trim(text).empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("knot '" + std::string(item) + "' is not of the form t:a");
    }
    const std::string_view ts = trim(item.substr(0, colon));
    const std::string_view as = trim(item.substr(colon + 1));
    WaveKnot k;
    const auto r1 = std::from_chars(ts.data(), ts.data() + ts.size(), k.t);
    const auto r2 = std::from_chars(as.data(), as.data() + as.size(), k.a);
    if (r1.ec != std::errc() || r1.ptr != ts.data() + ts.size() || r2.ec != std::errc() ||
        r2.ptr != as.data() + as.size()) {
      throw std::invalid_argument("knot '" + std::string(item) + "' is not numeric");
    }
    knots.push_back(k);
  }
  return knots;
}

RunConfig RunConfig::for_preset(Preset preset) {
  const SimulationSetup setup = SimulationSetup::for_preset(preset);
  RunConfig c;
  c.preset = preset;
  c.nx = setup.nx;
  c.ny = setup.ny;
  c.material = setup.material;
  c.t_final = setup.load.t_final;
  c.n_steps = setup.load.n_steps;
  c.knots = setup.load.knots;
  c.boundary = setup.load.boundary;
  c.load_scale = setup.load.scale;
  c.initial_phase = setup.initial_phase;
  c.seed = setup.seed;
  c.elastic_tol = setup.solver.elastic.gradient_tol;
  c.elastic_max_iterations = setup.solver.elastic.max_iterations;
  c.sweep_rel_tol = setup.solver.sweep_rel_tol;
  c.max_sweeps = setup.solver.max_sweeps;
  c.competitor_search = setup.solver.competitor_search;
  c.output = std::string("run_") + std::string(preset_name(preset));
  return c;
}

void RunConfig::validate() const {
  const auto check = [](bool ok, const char* key, const std::string& message) {
    if (!ok) throw ConfigError(key, message);
  };
  check(nx >= 1, "mesh.nx", "must be >= 1");
  check(ny >= 1, "mesh.ny", "must be >= 1");
  try {
    material.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("material", e.what());
  }
  check(std::isfinite(load_scale), "load.scale", "must be finite");
  if (preset == Preset::example1) check(boundary == BoundaryKind::clamped, "load.boundary", "example1 is clamped");
  if (preset == Preset::example2) {
    check(boundary == BoundaryKind::sheared_ribbon, "load.boundary", "example2 is sheared_ribbon");
  }
  try {
    LoadProgram load;
    load.t_final = t_final;
    load.n_steps = n_steps;
    load.knots = knots;
    load.scale = load_scale;
    load.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("load", e.what());
  }
  check(elastic_tol > 0.0 && std::isfinite(elastic_tol), "solver.elastic_tol", "must be > 0");
  check(elastic_max_iterations >= 1, "solver.elastic_max_iterations", "must be >= 1");
  check(sweep_rel_tol >= 0.0 && std::isfinite(sweep_rel_tol), "solver.sweep_rel_tol", "must be >= 0");
  check(max_sweeps >= 1, "solver.max_sweeps", "must be >= 1");
  check(!output.empty(), "run.output", "must not be empty");
}

SimulationSetup RunConfig::to_setup() const {
  SimulationSetup s;
  s.preset = preset;
  s.nx = nx;
  s.ny = ny;
  s.material = material;
  s.load.t_final = t_final;
  s.load.n_steps = n_steps;
  s.load.knots = knots;
  s.load.boundary = boundary;
  s.load.scale = load_scale;
  s.initial_phase = initial_phase;
  s.seed = seed;
  s.solver.elastic.gradient_tol = elastic_tol;
  s.solver.elastic.max_iterations = elastic_max_iterations;
  s.solver.sweep_rel_tol = sweep_rel_tol;
  s.solver.max_sweeps = max_sweeps;
  s.solver.competitor_search = competitor_search;
  return s;
}

std::vector<ConfigEntry> read_config_entries(std::string_view text, const std::string& source,
                                             const std::vector<std::string>& skip_sections) {
  std::vector<ConfigEntry> entries;
  std::string section;
  bool skipping = false;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string origin = source + ":" + std::to_string(line_no);
    line = trim(line);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(origin, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      skipping = std::find(skip_sections.begin(), skip_sections.end(), section) != skip_sections.end();
      continue;
    }
    if (skipping) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(origin, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(origin, "empty key");
    if (section.empty()) throw ConfigError(origin, "key '" + key + "' outside of a section");
    entries.push_back({section + "." + key, std::string(trim(line.substr(eq + 1))), origin});
  }
  return entries;
}

RunConfig build_config(const std::vector<ConfigEntry>& entries) {
  Preset preset = Preset::example1;
  for (const ConfigEntry& e : entries) {
    if (e.key == "run.preset") preset = convert(e, [](const std::string& v) { return parse_preset(v); });
  }
  RunConfig config = RunConfig::for_preset(preset);
  bool delta2_set = false;
  bool coefficients_set = false;
  const auto& table = setters();
  for (const ConfigEntry& e : entries) {
    const auto it = table.find(e.key);
    if (it == table.end()) throw ConfigError(e.origin, "unknown key '" + e.key + "'");
    it->second(config, e);
    delta2_set = delta2_set || e.key == "material.delta2";
    coefficients_set = coefficients_set || e.key == "material.alpha" || e.key == "material.delta1";
  }
  if (coefficients_set && !delta2_set) config.material.delta2 = 2.0 * config.material.alpha + 2.0 * config.material.delta1;
  config.validate();
  return config;
}

RunConfig parse_config_text(std::string_view text, const std::string& source) {
  return build_config(read_config_entries(text, source));
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  const auto b = [](bool v) { return v ? "true" : "false"; };
  out << "[run]\n"
      << "preset = " << preset_name(c.preset) << '\n'
      << "seed = " << c.seed << '\n'
      << "output = " << c.output << '\n'
      << "snapshots = " << b(c.emit_snapshots) << '\n'
      << "diagnostics = " << b(c.run_diagnostics) << "\n\n"
      << "[mesh]\n"
      << "nx = " << c.nx << '\n'
      << "ny = " << c.ny << "\n\n"
      << "[material]\n"
      << "alpha = " << format_double(c.material.alpha) << '\n'
      << "delta1 = " << format_double(c.material.delta1) << '\n'
      << "delta2 = " << format_double(c.material.delta2) << '\n'
      << "epsilon = " << format_double(c.material.epsilon) << '\n'
      << "beta = " << format_double(c.material.beta) << '\n'
      << "alpha_i = " << format_double(c.material.alpha_i) << '\n'
      << "alpha_s = " << format_double(c.material.alpha_s) << "\n\n"
      << "[load]\n"
      << "boundary = " << boundary_kind_name(c.boundary) << '\n'
      << "scale = " << format_double(c.load_scale) << '\n'
      << "t_final = " << format_double(c.t_final) << '\n'
      << "n_steps = " << c.n_steps << '\n'
      << "knots = " << format_knots(c.knots) << '\n'
      << "initial_phase = " << initial_phase_name(c.initial_phase) << "\n\n"
      << "[solver]\n"
      << "elastic_tol = " << format_double(c.elastic_tol) << '\n'
      << "elastic_max_iterations = " << c.elastic_max_iterations << '\n'
      << "sweep_rel_tol = " << format_double(c.sweep_rel_tol) << '\n'
      << "max_sweeps = " << c.max_sweeps << '\n'
      << "competitor_search = " << b(c.competitor_search) << '\n';
  return out.str();
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

}  // namespace smamicro
