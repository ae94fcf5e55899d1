#pragma once

// Named scenarios binding a parameter table to the verification modules.
// A run produces a report (config echo, checks, metrics, series paths) that
// is byte-identical for identical configurations; wall-clock data goes to a
// separate run_meta.json.

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace reductcheck::scenarios {

using json = nlohmann::ordered_json;

struct ScenarioInfo {
  std::string name;
  std::string description;
};

/// Built-in scenarios in a fixed order.
const std::vector<ScenarioInfo>& list_scenarios();

/// Complete default parameter table of a scenario; ConfigError if unknown.
json default_params(const std::string& scenario);

struct ScenarioConfig {
  std::string scenario;
  /// Full parameter table (defaults merged with overrides).
  json params;
  std::filesystem::path out_dir;
};

/// Defaults for `scenario`, with the seed replaced when given.
ScenarioConfig default_config(const std::string& scenario, std::optional<std::uint64_t> seed = {});

/// Parses a TOML file with top-level keys `scenario`, optional `out` and
/// `seed`, and a `[params]` table. Unknown keys, wrongly typed values and
/// missing required keys raise ConfigError.
ScenarioConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed = {});

/// Same as load_config for TOML text already in memory.
ScenarioConfig parse_config(const std::string& toml_text, std::optional<std::uint64_t> seed = {});

/// Overlays `overrides` on the scenario defaults, rejecting unknown keys and
/// type mismatches.
json merge_params(const std::string& scenario, const json& overrides);

struct Check {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  /// "<=", ">=", "<", ">" or "==" between value and bound.
  std::string relation;
  bool pass = false;
};

struct Series {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  std::string scenario;
  json config;
  std::vector<Check> checks;
  json metrics = json::object();
  std::vector<Series> series;
  /// Relative paths of the written CSV files.
  std::vector<std::string> series_paths;

  bool pass() const;
  json to_json() const;
};

/// Runs one scenario. With a nonempty out_dir, writes report.json,
/// run_meta.json and series/<name>.csv there.
RunReport run_scenario(const ScenarioConfig& config);

} // namespace reductcheck::scenarios
