#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "stc/fem.hpp"
#include "stc/geometry.hpp"

namespace stc::cli {

/// Invalid run description; `field` is a JSON pointer into the spec.
class SpecError : public std::invalid_argument {
 public:
  SpecError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"solve",       "optimize", "shape-grad-check",
                                              "sweep-alpha", "sweep-mu", "verify-1d"};
  return names;
}

struct RunSpec {
  std::string command;
  Domain domain = Disk{1.0};
  double resolution = 0.05;
  ProblemConfig cfg;
  std::optional<double> alpha;
  /// Explicit hole as (start, length) arcs in boundary arclength.
  std::vector<std::pair<double, double>> hole;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::string run_id;
  std::filesystem::path output_root;
  /// Command-specific settings, validated by the command.
  nlohmann::json options = nlohmann::json::object();
  /// The normalized spec, echoed into summary.json.
  nlohmann::json source;
};

/// Output root from STC_OUTPUT_ROOT, else "results".
std::filesystem::path default_output_root();

/// Parses a config document. Throws SpecError with a line and column for
/// malformed JSON.
nlohmann::json parse_config_text(const std::string& text, const std::string& origin);

/// Validates and converts a JSON run description (see README for the schema).
/// Checks p, q against the critical trace exponent before any work starts.
RunSpec parse_run_spec(const nlohmann::json& doc);

/// Deterministic default run id: command plus a hash of the normalized spec.
std::string default_run_id(const nlohmann::json& doc);

/// Typed access to `options` with diagnostics naming the field.
double option_number(const RunSpec& spec, const std::string& key, double fallback);
int option_int(const RunSpec& spec, const std::string& key, int fallback);
std::string option_string(const RunSpec& spec, const std::string& key, const std::string& fallback);
std::vector<double> option_numbers(const RunSpec& spec, const std::string& key,
                                   std::vector<double> fallback);
bool option_bool(const RunSpec& spec, const std::string& key, bool fallback);

}  // namespace stc::cli
