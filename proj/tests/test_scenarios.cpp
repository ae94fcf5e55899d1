#include "support.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/scenarios/scenarios.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

using namespace reductcheck;
using namespace reductcheck::scenarios;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name)
{
  const fs::path p = fs::temp_directory_path() / ("reductcheck_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int cli(const std::string& args)
{
  const std::string cmd = std::string(REDUCTCHECK_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_CASE("scenario list is complete and stable")
{
  const auto& list = list_scenarios();
  CHECK(list.size() >= 12);
  std::set<std::string> names;
  for (const auto& s : list) {
    CHECK_FALSE(s.description.empty());
    names.insert(s.name);
  }
  CHECK(names.size() == list.size());
  CHECK(names.count("reduction_sho") == 1);
  CHECK(&list_scenarios() == &list);
  CHECK(list.front().name == "reduction_sho");
}

TEST_CASE("every scenario has a complete default table")
{
  for (const auto& s : list_scenarios()) {
    const json d = default_params(s.name);
    CHECK(d.is_object());
    CHECK(d.contains("seed"));
    // Defaults merged with nothing are the defaults.
    CHECK(merge_params(s.name, json::object()) == d);
  }
  CHECK_THROWS_AS(default_params("nope"), ConfigError);
}

TEST_CASE("parameter overrides are validated")
{
  CHECK_THROWS_AS(merge_params("reduction_sho", json{{"no_such_key", 1}}), ConfigError);
  CHECK_THROWS_AS(merge_params("reduction_sho", json{{"delta", "small"}}), ConfigError);
  CHECK(merge_params("reduction_sho", json{{"delta", 0.5}})["delta"] == 0.5);
  // Integers are accepted where a float is expected.
  CHECK(merge_params("reduction_sho", json{{"delta", 1}})["delta"] == 1.0);
}

TEST_CASE("TOML configs")
{
  const auto ok = parse_config("scenario = \"reduction_sho\"\n[params]\ndelta = 1e-3\ntau = 6.0\n");
  CHECK(ok.scenario == "reduction_sho");
  CHECK(ok.params["delta"] == 1e-3);
  CHECK(ok.params["grid_points"] == 128);
  CHECK_THROWS_AS(parse_config("scenario = \"reduction_sho\"\n[params]\ntau = 6.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = \"nope\"\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = \"relativity_contraction\"\ncolour = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("scenario = \n"), ConfigError);
  // Required keys bind only configs, not the defaults.
  CHECK_NOTHROW(parse_config("scenario = \"relativity_contraction\"\n"));

  const auto seeded = parse_config("scenario = \"relativity_contraction\"\nseed = 5\n", 9);
  CHECK(seeded.params["seed"] == 9);
  CHECK(parse_config("scenario = \"relativity_contraction\"\nseed = 5\n").params["seed"] == 5);
  CHECK(default_config("histories_trivial", 42).params["seed"] == 42);
}

TEST_CASE("reports are byte-identical for identical configs and outputs are written")
{
  const auto a = run_scenario(default_config("relativity_contraction"));
  const auto b = run_scenario(default_config("relativity_contraction"));
  CHECK(a.pass());
  CHECK(a.to_json().dump() == b.to_json().dump());
  CHECK(a.to_json()["config"]["scenario"] == "relativity_contraction");

  auto cfg = default_config("histories_trivial");
  cfg.out_dir = scratch("histories");
  const auto r = run_scenario(cfg);
  CHECK(r.pass());
  CHECK(fs::exists(cfg.out_dir / "report.json"));
  CHECK(fs::exists(cfg.out_dir / "run_meta.json"));
  CHECK(json::parse(slurp(cfg.out_dir / "report.json")) == r.to_json());
  for (const auto& p : r.series_paths) {
    CHECK(fs::exists(cfg.out_dir / p));
    CHECK_FALSE(slurp(cfg.out_dir / p).empty());
  }
  const json meta = json::parse(slurp(cfg.out_dir / "run_meta.json"));
  CHECK(meta["scenario"] == "histories_trivial");
  CHECK(meta.contains("elapsed_seconds"));
  fs::remove_all(cfg.out_dir);
}

TEST_CASE("a failing bound fails the report without throwing")
{
  auto cfg = default_config("pure_decoherence");
  cfg.params["tolerance"] = 0.0;
  const auto r = run_scenario(cfg);
  CHECK_FALSE(r.pass());
}

TEST_CASE("CLI exit codes")
{
  const fs::path dir = scratch("cli");
  CHECK(cli("list") == 0);
  CHECK(cli("defaults reduction_sho") == 0);
  CHECK(cli("defaults nope") == 2);
  CHECK(cli("run --scenario relativity_contraction -q") == 0);
  CHECK(cli("run --scenario nope") == 2);
  CHECK(cli("run") == 2);
  CHECK(cli("--bogus-flag") == 2);

  std::ofstream(dir / "missing_delta.toml") << "scenario = \"reduction_sho\"\n[params]\ntau = 6.0\n";
  CHECK(cli((dir / "missing_delta.toml").string()) == 2);
  CHECK(cli("run " + (dir / "missing_delta.toml").string()) == 2);

  std::ofstream(dir / "fail.toml") << "scenario = \"pure_decoherence\"\n[params]\ntolerance = 0.0\n";
  CHECK(cli("run " + (dir / "fail.toml").string() + " -q") == 1);

  std::ofstream(dir / "ok.toml") << "scenario = \"relativity_contraction\"\nout = \"" << (dir / "out").string()
                                 << "\"\n";
  CHECK(cli("run " + (dir / "ok.toml").string() + " -q --seed 3") == 0);
  CHECK(fs::exists(dir / "out" / "report.json"));
  fs::remove_all(dir);
}
