#pragma once

#include <filesystem>
#include <ostream>

#include <nlohmann/json.hpp>

#include "stc/cli/spec.hpp"

namespace stc::cli {

inline constexpr int kExitConverged = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitNotConverged = 2;

struct CommandOutcome {
  int exit_code = kExitConverged;
  std::filesystem::path directory;
  nlohmann::json summary;
};

/// Runs one command and writes results/<run-id>/{summary.json, data.csv,
/// mesh.json, extremal.csv} (mesh and extremal where a single mesh applies).
/// Progress lines go to `log`. Throws SpecError or ConfigError on invalid
/// input.
CommandOutcome run_command(const RunSpec& spec, std::ostream& log);

}  // namespace stc::cli
