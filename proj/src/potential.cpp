#include "reductcheck/potential.hpp"

#include "reductcheck/error.hpp"

#include <cmath>

namespace reductcheck {

Potential free_potential()
{
  Potential v;
  v.name = "free";
  v.value = [](std::span<const double>) { return 0.0; };
  v.gradient = [](std::span<const double>, std::span<double> g) {
    for (double& gi : g) gi = 0.0;
  };
  v.rotation_invariant = true;
  v.translation_invariant = true;
  v.quadratic = true;
  return v;
}

Potential harmonic_potential(double k, double center)
{
  Potential v;
  v.name = "harmonic";
  v.value = [k, center](std::span<const double> q) {
    double s = 0.0;
    for (double qi : q) s += (qi - center) * (qi - center);
    return 0.5 * k * s;
  };
  v.gradient = [k, center](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = k * (q[i] - center);
  };
  v.rotation_invariant = center == 0.0;
  v.quadratic = true;
  v.max_curvature = k;
  return v;
}

Potential quartic_potential(double lambda)
{
  Potential v;
  v.name = "quartic";
  v.value = [lambda](std::span<const double> q) {
    double s = 0.0;
    for (double qi : q) s += qi * qi * qi * qi;
    return 0.25 * lambda * s;
  };
  v.gradient = [lambda](std::span<const double> q, std::span<double> g) {
    for (std::size_t i = 0; i < q.size(); ++i) g[i] = lambda * q[i] * q[i] * q[i];
  };
  return v;
}

Potential pair_harmonic_potential(double k)
{
  Potential v;
  v.name = "pair_harmonic";
  v.value = [k](std::span<const double> q) {
    const double r = q[0] - q[1];
    return 0.5 * k * r * r;
  };
  v.gradient = [k](std::span<const double> q, std::span<double> g) {
    const double f = k * (q[0] - q[1]);
    g[0] = f;
    g[1] = -f;
  };
  v.translation_invariant = true;
  v.quadratic = true;
  v.max_curvature = 2.0 * k;
  return v;
}

Potential potential_by_name(const std::string& name, std::span<const double> params)
{
  auto param = [&](std::size_t i, double fallback) { return i < params.size() ? params[i] : fallback; };
  if (name == "free") return free_potential();
  if (name == "harmonic") return harmonic_potential(param(0, 1.0), param(1, 0.0));
  if (name == "quartic") return quartic_potential(param(0, 1.0));
  if (name == "pair_harmonic") return pair_harmonic_potential(param(0, 1.0));
  throw ConfigError("unknown potential '" + name + "'");
}

} // namespace reductcheck
