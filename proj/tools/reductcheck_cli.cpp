// Scenario runner: reductcheck list | run <config.toml> | run --scenario <name>
#include "reductcheck/error.hpp"
#include "reductcheck/scenarios/scenarios.hpp"
#include "reductcheck/threads.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace rs = reductcheck::scenarios;

namespace {

void print_summary(const rs::RunReport& r, const std::filesystem::path& out)
{
  std::printf("%s: %s\n", r.scenario.c_str(), r.pass() ? "pass" : "fail");
  for (const auto& c : r.checks) {
    std::printf("  %-4s %-40s %.6g %s %.6g\n", c.pass ? "ok" : "FAIL", c.name.c_str(), c.value, c.relation.c_str(),
                c.bound);
  }
  if (!out.empty()) std::printf("report: %s\n", (out / "report.json").string().c_str());
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Reduction checks between dynamical models"};
  app.require_subcommand(1);

  app.add_subcommand("list", "List built-in scenarios");

  auto* run = app.add_subcommand("run", "Run one scenario");
  std::string config_path;
  std::string scenario;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  run->add_option("config", config_path, "TOML config file");
  run->add_option("--scenario", scenario, "Run a built-in scenario with its defaults");
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seed", seed, "Seed (overrides the config)");
  run->add_flag("-q,--quiet", quiet, "Only print the verdict line");

  auto* defaults = app.add_subcommand("defaults", "Print a scenario's default parameters as JSON");
  std::string defaults_name;
  defaults->add_option("scenario", defaults_name)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  reductcheck::configure_threads_from_env();
  try {
    if (app.got_subcommand("list")) {
      for (const auto& s : rs::list_scenarios()) std::printf("%-30s %s\n", s.name.c_str(), s.description.c_str());
      return 0;
    }
    if (app.got_subcommand("defaults")) {
      std::cout << rs::default_params(defaults_name).dump(2) << "\n";
      return 0;
    }
    if (config_path.empty() == scenario.empty()) {
      std::cerr << "error: give either a config file or --scenario\n";
      return 2;
    }
    rs::ScenarioConfig config = config_path.empty() ? rs::default_config(scenario, seed)
                                                    : rs::load_config(config_path, seed);
    if (!out_dir.empty()) config.out_dir = out_dir;
    const rs::RunReport report = rs::run_scenario(config);
    if (quiet) std::printf("%s: %s\n", report.scenario.c_str(), report.pass() ? "pass" : "fail");
    else print_summary(report, config.out_dir);
    return report.pass() ? 0 : 1;
  } catch (const reductcheck::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const reductcheck::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const reductcheck::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
