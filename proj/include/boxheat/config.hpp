#pragma once

// Experiment configuration: flat INI text with sections, loaded from built-in
// presets, files, and "section.key=value" overrides (applied in that order).
// Every key is checked against the known schema; unknown keys are rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "boxheat/stability.hpp"

namespace boxheat {

struct ScheduleConfig {
  std::string kind = "uniform";  // uniform | geometric | list
  double spacing = 0.05;
  double t_final = 1.0;
  double t_min = 0.05;
  int count = 6;
  std::vector<double> times;

  std::vector<double> build() const;
};

struct ExperimentConfig {
  std::string preset;  // name of the preset the config started from, if any

  // [weight]
  std::string weight_name = "modsq";
  std::string weight_coeffs;  // "j,k,re,im; ..." overrides the name when set
  double delta_extent = 3.0;
  int delta_resolution = 61;
  int delta_refine = 8;

  // [grid]
  double extent = 4.0;
  int points = 65;

  // [stepper]
  StepperConfig stepper;

  // [nonlinearity]
  Nonlinearity nonlinearity;

  // [initial]: u0 = amplitude exp(-|z - c|^2 / width^2), u0_hat = (1 + perturbation) u0
  double amplitude = 0.05;
  double width = 1.0;
  double center_x = 0.0;
  double center_y = 0.0;
  double perturbation = 0.01;

  // [stability]
  double q = 3.0;
  double n = 3.0;
  std::string model = "auto";  // auto | power_law | exponential
  double window_start = 0.0;
  double window_end = 0.0;
  PairSolver solver = PairSolver::imex;

  // [schedule]
  ScheduleConfig schedule;

  // [kernel]
  double source_x = 0.0;
  double source_y = 0.0;
  std::vector<double> kernel_times{0.25, 0.5, 1.0};
  double slack = 0.05;

  // [picard]
  PicardOptions picard;
  double picard_ds = 0.05;
  double picard_t_final = 1.0;

  // [lplq]
  double lp_p = kInfNorm;
  double lp_q = 1.0;
  std::vector<double> probe_widths{0.1, 0.25, 0.5};
  int random_probes = 0;
  double lp_window_start = 0.2;
  double lp_window_end = 2.0;
  std::string lp_model = "auto";

  // [beta]
  std::vector<std::pair<double, double>> beta_pairs{{0.5, 0.5}, {0.3, 0.4}, {0.9, 0.05}};
  std::vector<double> beta_times{0.1, 2.0};

  // [audit]
  int trials = 8;

  // [run]
  std::string out = "out";
  std::uint64_t seed = 1;
  int jobs = 1;

  /// Re-validates every section; throws ValidationError naming the field.
  void validate() const;
  Weight weight() const;
  GridSpec grid() const;
  ComplexField initial(const GridSpec& g) const;

  /// Canonical INI text of every field, suitable for reloading.
  std::string to_ini() const;
};

/// Preset INI text; throws ValidationError for an unknown name.
std::string_view preset_text(std::string_view name);
std::vector<std::string> preset_names();

struct ConfigSources {
  std::optional<std::string> preset;
  std::optional<std::string> file;
  std::vector<std::string> overrides;  // "section.key=value"
};

/// Defaults, then the preset, then the file, then the overrides.
ExperimentConfig load_config(const ConfigSources& sources);
/// Parses INI text on top of the defaults.
ExperimentConfig parse_config(std::string_view ini);

/// "j,k,re,im; ..." -> polynomial coefficient table.
std::map<Bidegree, cplx> parse_coefficients(std::string_view text);

}  // namespace boxheat
