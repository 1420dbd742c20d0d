#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bellkl/search.hpp"

namespace bellkl {

/// Configuration or command-line problem; the message names the offending
/// key and the accepted range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kAppendixTable, kDelimitedValues };

/// One batch run: a command plus the state, detection and search parameters
/// it needs. Assembled from an optional key = value file and command-line
/// flags (flags win), then validated as a whole.
struct RunConfig {
  std::string command;  // strength|optimize|eta-min|eta-for-strength|trace|simulate|chsh

  std::optional<StateFamily> family;
  std::optional<double> theta_deg;
  std::optional<double> gamma_deg;
  double phi_deg = 0.0;

  DetectionKind kind = DetectionKind::kCounter;
  double eta = 1.0;
  double target_s = 0.0;
  std::vector<double> grid;
  std::optional<std::array<double, 4>> angles_deg;  // A1 A2 B1 B2 polar angles
  long long trials = 1'000'000;

  std::string out_path;
  OutputFormat format = OutputFormat::kAppendixTable;

  SearchConfig search;

  /// Family after inference from theta/gamma; only valid once validated.
  StateFamily resolved_family() const;
  /// State parameter (theta or gamma) for single-state commands.
  double parameter_deg() const;
  FockState state() const;
  SettingQuad setting_quad() const;  // from angles_deg, planar
};

/// Applies one key = value assignment. Unknown keys and malformed values
/// raise ConfigError naming the key.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

/// Parses a plain-text key = value document ('#' comments, blank lines ok).
RunConfig parse_config(const std::string& text);

/// Cross-field validation: exactly one state family, command-specific
/// required fields, ranges.
void validate_config(const RunConfig& config);

/// Canonical key = value dump of the effective configuration; feeding it
/// back through parse_config reproduces the run.
std::string dump_config(const RunConfig& config);

}  // namespace bellkl
