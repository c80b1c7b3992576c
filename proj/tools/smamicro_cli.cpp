#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smamicro/config.hpp"
#include "smamicro/run_io.hpp"

namespace {

using smamicro::ConfigEntry;
using smamicro::ExitCode;

struct ConfigSource {
  std::string file;
  std::map<std::string, std::string> flags;  // section.key -> value
};

void add_config_flags(CLI::App* cmd, ConfigSource& src) {
  cmd->add_option("-c,--config", src.file, "key = value config file")->check(CLI::ExistingFile);
  for (const std::string& key : smamicro::config_keys()) {
    const std::string name = key.substr(key.find('.') + 1);
    cmd->add_option_function<std::string>(
        "--" + name, [&src, key](const std::string& v) { src.flags[key] = v; }, "overrides " + key);
  }
}

smamicro::RunConfig load_config(const ConfigSource& src) {
  std::vector<ConfigEntry> entries;
  if (!src.file.empty()) {
    std::ifstream in(src.file);
    if (!in) throw smamicro::ConfigError(src.file, "cannot open config file");
    std::ostringstream text;
    text << in.rdbuf();
    entries = smamicro::read_config_entries(text.str(), src.file);
  }
  for (const auto& [key, value] : src.flags) {
    entries.push_back({key, value, "--" + key.substr(key.find('.') + 1)});
  }
  return smamicro::build_config(entries);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasistatic two-variant shape-memory microstructure simulator"};
  app.require_subcommand(1);

  ConfigSource run_src;
  CLI::App* run = app.add_subcommand("run", "run a simulation and write the run directory");
  add_config_flags(run, run_src);

  ConfigSource check_src;
  CLI::App* check = app.add_subcommand("check", "validate a configuration and print its canonical form");
  add_config_flags(check, check_src);

  std::string run_dir;
  bool write_report = false;
  CLI::App* diagnose = app.add_subcommand("diagnose", "replay stability and energy-balance checks on a run directory");
  diagnose->add_option("run_dir", run_dir, "directory written by 'run'")->required()->check(CLI::ExistingDirectory);
  diagnose->add_flag("--write-report", write_report, "also write diagnostics.csv into the run directory");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed() || check->parsed()) {
    smamicro::RunConfig config;
    try {
      config = load_config(run->parsed() ? run_src : check_src);
    } catch (const smamicro::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return static_cast<int>(ExitCode::config_error);
    }
    if (check->parsed()) {
      std::cout << smamicro::serialize_config(config);
      return 0;
    }
    return static_cast<int>(smamicro::run_to_directory(config, std::cout));
  }
  return static_cast<int>(
      smamicro::diagnose_directory(run_dir, std::cout, write_report ? std::filesystem::path(run_dir) : ""));
}
