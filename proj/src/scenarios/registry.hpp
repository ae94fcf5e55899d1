#pragma once

#include "reductcheck/scenarios/scenarios.hpp"

#include <functional>
#include <string>
#include <vector>

namespace reductcheck::scenarios::detail {

/// Typed access to a scenario's parameter table plus the report being built.
class Context {
public:
  Context(const json& params, RunReport& report) : params_(params), report_(report) {}

  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::vector<double> list(const std::string& key) const;
  std::uint64_t seed() const;

  void check(const std::string& name, double value, const std::string& relation, double bound);
  void metric(const std::string& name, json value) { report_.metrics[name] = std::move(value); }
  void add_series(Series s) { report_.series.push_back(std::move(s)); }

private:
  const json& at(const std::string& key) const;

  const json& params_;
  RunReport& report_;
};

struct ScenarioDef {
  std::string name;
  std::string description;
  json defaults;
  /// Keys a config file must set explicitly.
  std::vector<std::string> required;
  std::function<void(Context&)> run;
};

const std::vector<ScenarioDef>& registry();
const ScenarioDef& find(const std::string& name);

} // namespace reductcheck::scenarios::detail
