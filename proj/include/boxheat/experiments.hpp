#pragma once

// Command runners behind the CLI. Each writes its CSV outputs and a
// manifest.ini (config echo, version, wall time) into config.out, prints a
// short summary, and returns the process exit code:
//   0 success, 1 validation error, 2 numerical failure, 3 bound violation.

#include <iosfwd>
#include <string_view>

#include "boxheat/config.hpp"

namespace boxheat {

inline constexpr std::string_view kVersion = "1.0.0";

int cmd_delta(const ExperimentConfig& c, std::ostream& log);
int cmd_audit(const ExperimentConfig& c, std::ostream& log);
int cmd_evolve(const ExperimentConfig& c, std::ostream& log);
int cmd_kernel(const ExperimentConfig& c, std::ostream& log);
int cmd_picard(const ExperimentConfig& c, std::ostream& log);
int cmd_perturb(const ExperimentConfig& c, std::ostream& log);
int cmd_lplq(const ExperimentConfig& c, std::ostream& log);
int cmd_beta_check(const ExperimentConfig& c, std::ostream& log);

/// Dispatches by subcommand name, writes the manifest, and maps exceptions
/// to exit codes (the message goes to `err`).
int run_command(std::string_view name, const ExperimentConfig& c, std::ostream& log, std::ostream& err);

}  // namespace boxheat
