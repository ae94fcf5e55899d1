#include "registry.hpp"

#include "reductcheck/error.hpp"

#include <toml.hpp>

#include <fstream>
#include <sstream>

namespace reductcheck::scenarios {

namespace {

json to_json(const toml::node& node, const std::string& where)
{
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = to_json(v, where + "." + std::string(k.str()));
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(to_json(v, where));
    return out;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  throw ConfigError("unsupported TOML value at " + where + " (dates and times are not parameters)");
}

/// Coerces `value` to the type of `reference`, or throws.
json conform(const json& reference, const json& value, const std::string& key)
{
  auto fail = [&](const char* want) { throw ConfigError("parameter '" + key + "' must be " + want); };
  if (reference.is_boolean()) {
    if (!value.is_boolean()) fail("a boolean");
    return value;
  }
  if (reference.is_number_unsigned()) {
    if (!value.is_number_integer() || value.get<long long>() < 0) fail("a nonnegative integer");
    return json(value.get<unsigned long long>());
  }
  if (reference.is_number_integer()) {
    if (!value.is_number_integer()) fail("an integer");
    return value;
  }
  if (reference.is_number_float()) {
    if (!value.is_number()) fail("a number");
    return json(value.get<double>());
  }
  if (reference.is_string()) {
    if (!value.is_string()) fail("a string");
    return value;
  }
  if (reference.is_array()) {
    if (!value.is_array()) fail("an array");
    json out = json::array();
    const json elem = reference.empty() ? json(0.0) : reference.front();
    for (const auto& v : value) out.push_back(conform(elem, v, key + "[]"));
    return out;
  }
  throw ConfigError("parameter '" + key + "' has no usable default");
}

} // namespace

const std::vector<ScenarioInfo>& list_scenarios()
{
  static const std::vector<ScenarioInfo> infos = [] {
    std::vector<ScenarioInfo> out;
    for (const auto& d : detail::registry()) out.push_back({d.name, d.description});
    return out;
  }();
  return infos;
}

json default_params(const std::string& scenario) { return detail::find(scenario).defaults; }

json merge_params(const std::string& scenario, const json& overrides)
{
  json params = default_params(scenario);
  if (!overrides.is_object()) throw ConfigError("[params] must be a table");
  for (const auto& [key, value] : overrides.items()) {
    if (!params.contains(key)) throw ConfigError("unknown parameter '" + key + "' for scenario " + scenario);
    params[key] = conform(params[key], value, key);
  }
  return params;
}

ScenarioConfig default_config(const std::string& scenario, std::optional<std::uint64_t> seed)
{
  ScenarioConfig c;
  c.scenario = scenario;
  c.params = default_params(scenario);
  if (seed) c.params["seed"] = *seed;
  return c;
}

ScenarioConfig parse_config(const std::string& toml_text, std::optional<std::uint64_t> seed)
{
  toml::table table;
  try {
    table = toml::parse(toml_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(msg.str());
  }
  const json doc = to_json(table, "config");
  for (const auto& [key, value] : doc.items()) {
    if (key != "scenario" && key != "out" && key != "seed" && key != "params") {
      throw ConfigError("unknown top-level key '" + key + "'");
    }
  }
  if (!doc.contains("scenario") || !doc["scenario"].is_string()) throw ConfigError("config needs a scenario name");
  ScenarioConfig c;
  c.scenario = doc["scenario"].get<std::string>();
  const auto& def = detail::find(c.scenario);
  const json overrides = doc.contains("params") ? doc["params"] : json::object();
  for (const auto& key : def.required) {
    if (!overrides.is_object() || !overrides.contains(key)) {
      throw ConfigError("scenario " + c.scenario + " requires parameter '" + key + "' in [params]");
    }
  }
  c.params = merge_params(c.scenario, overrides);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_integer() || doc["seed"].get<long long>() < 0) {
      throw ConfigError("seed must be a nonnegative integer");
    }
    c.params["seed"] = doc["seed"].get<unsigned long long>();
  }
  if (doc.contains("out")) {
    if (!doc["out"].is_string()) throw ConfigError("out must be a string");
    c.out_dir = doc["out"].get<std::string>();
  }
  if (seed) c.params["seed"] = *seed;
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& file, std::optional<std::uint64_t> seed)
{
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot read config file " + file.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), seed);
}

namespace detail {

const json& Context::at(const std::string& key) const
{
  if (!params_.contains(key)) throw ConfigError("missing parameter '" + key + "'");
  return params_.at(key);
}

double Context::num(const std::string& key) const { return at(key).get<double>(); }
long long Context::integer(const std::string& key) const { return at(key).get<long long>(); }

std::size_t Context::count(const std::string& key) const
{
  const long long v = at(key).get<long long>();
  if (v < 0) throw ConfigError("parameter '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

bool Context::flag(const std::string& key) const { return at(key).get<bool>(); }
std::string Context::str(const std::string& key) const { return at(key).get<std::string>(); }
std::vector<double> Context::list(const std::string& key) const { return at(key).get<std::vector<double>>(); }
std::uint64_t Context::seed() const { return at("seed").get<std::uint64_t>(); }

const ScenarioDef& find(const std::string& name)
{
  for (const auto& d : registry()) {
    if (d.name == name) return d;
  }
  throw ConfigError("unknown scenario '" + name + "' (see `list`)");
}

} // namespace detail

} // namespace reductcheck::scenarios
