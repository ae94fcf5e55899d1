#include "reductcheck/scenarios/scenarios.hpp"

#include "reductcheck/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace reductcheck::scenarios {

namespace {

/// Shortest round-trip decimal form, so CSV output is deterministic.
std::string format_double(double v)
{
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int precision = 6; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Non-finite values are not valid JSON; they become strings.
json finite_or_string(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

void write_text(const std::filesystem::path& file, const std::string& text)
{
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + file.string());
}

} // namespace

bool RunReport::pass() const
{
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

json RunReport::to_json() const
{
  json j;
  j["scenario"] = scenario;
  j["config"] = config;
  j["verdict"] = pass() ? "pass" : "fail";
  json cs = json::array();
  for (const auto& c : checks) {
    cs.push_back({{"name", c.name},
                  {"value", finite_or_string(c.value)},
                  {"relation", c.relation},
                  {"bound", finite_or_string(c.bound)},
                  {"verdict", c.pass ? "pass" : "fail"}});
  }
  j["checks"] = cs;
  j["metrics"] = metrics;
  j["series"] = series_paths;
  return j;
}

std::string series_csv(const Series& s)
{
  std::string text;
  for (std::size_t c = 0; c < s.columns.size(); ++c) text += (c ? "," : "") + s.columns[c];
  text += '\n';
  for (const auto& row : s.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) text += (c ? "," : "") + format_double(row[c]);
    text += '\n';
  }
  return text;
}

void write_outputs(RunReport& report, const std::filesystem::path& dir, const json& meta)
{
  std::filesystem::create_directories(dir / "series");
  report.series_paths.clear();
  for (const auto& s : report.series) {
    const std::string rel = "series/" + s.name + ".csv";
    write_text(dir / rel, series_csv(s));
    report.series_paths.push_back(rel);
  }
  write_text(dir / "report.json", report.to_json().dump(2) + "\n");
  write_text(dir / "run_meta.json", meta.dump(2) + "\n");
}

} // namespace reductcheck::scenarios
