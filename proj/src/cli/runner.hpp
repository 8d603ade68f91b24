#pragma once

// Subcommand dispatch. Every subcommand writes its artifacts plus a manifest
// (<name>.manifest.json) into the output directory; `report` aggregates them.

#include <ostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace stf::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode { kOk = 0, kUsage = 1, kViolation = 2, kInconclusive = 3 };

const std::vector<std::string>& subcommands();

/// Runs one subcommand, mapping library errors to exit codes. Diagnostics go to `log`.
int run(const std::string& subcommand, const ExperimentConfig& cfg, std::ostream& log);

/// Defaults shared with the tests.
ActionPtr action_of(const ExperimentConfig& cfg);
RationalFunction default_f_e(const ActionPtr& action);
Region default_base(const ActionPtr& action);
std::vector<int> default_n(const GroupSpec& spec, Averaging kind);

}  // namespace stf::cli
