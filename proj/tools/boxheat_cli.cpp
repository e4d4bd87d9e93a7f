#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "boxheat/error.hpp"
#include "boxheat/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Weighted Cauchy-Riemann heat flow experiments"};
  app.set_version_flag("--version", std::string(boxheat::kVersion));
  app.require_subcommand(0, 1);

  std::string config_path;
  std::string preset;
  std::string out;
  std::optional<int> jobs;
  std::optional<long long> seed;
  std::vector<std::string> overrides;
  bool list_presets = false;

  app.add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--preset", preset, "built-in preset");
  app.add_option("--out", out, "output directory (overrides run.out)");
  app.add_option("--jobs", jobs, "worker cap (overrides run.jobs)")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed (overrides run.seed)")->check(CLI::NonNegativeNumber);
  app.add_option("--set", overrides, "override a key: section.key=value (repeatable)");
  app.add_flag("--list-presets", list_presets, "print the preset names and exit");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"delta", "compute delta(phi) and its classification"},
      {"audit", "operator audit: Hermitian defect, Rayleigh quotients, lambda_min"},
      {"evolve", "evolve initial data (linear or semilinear)"},
      {"kernel", "heat kernel columns against the Gaussian envelopes"},
      {"picard", "Picard iteration for the mild solution"},
      {"perturb", "paired solutions and their decay fit"},
      {"lplq", "L^p-L^q ratio probes"},
      {"beta-check", "Beta integral quadrature against log-Gamma"},
  };
  app.fallthrough();
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (list_presets) {
    for (const std::string& p : boxheat::preset_names()) std::cout << p << '\n';
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << "error: a subcommand is required\n" << app.help();
    return 1;
  }

  boxheat::ConfigSources sources;
  if (!preset.empty()) sources.preset = preset;
  if (!config_path.empty()) sources.file = config_path;
  sources.overrides = overrides;
  if (!out.empty()) sources.overrides.push_back("run.out=" + out);
  if (jobs) sources.overrides.push_back(fmt::format("run.jobs={}", *jobs));
  if (seed) sources.overrides.push_back(fmt::format("run.seed={}", *seed));

  boxheat::ExperimentConfig cfg;
  try {
    cfg = boxheat::load_config(sources);
  } catch (const boxheat::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return boxheat::run_command(app.get_subcommands().front()->get_name(), cfg, std::cout, std::cerr);
}
