#include "reductcheck/relativity/relativity.hpp"

#include "reductcheck/error.hpp"

#include <cmath>

namespace reductcheck {

void BoostParams::validate() const
{
  if (!(c > 0.0)) throw DomainError("c must be positive");
  if (!(std::abs(v) < c)) throw DomainError("boost needs |v| < c");
}

double BoostParams::gamma() const
{
  const double b = v / c;
  return 1.0 / std::sqrt((1.0 - b) * (1.0 + b));
}

Event lorentz_boost(const Event& e, const BoostParams& b)
{
  b.validate();
  const double g = b.gamma();
  return {g * (e.t - b.v * e.x / (b.c * b.c)), g * (e.x - b.v * e.t)};
}

Event galilean_boost(const Event& e, double v) { return {e.t, e.x - v * e.t}; }

double simultaneity_residual(const BoostParams& b, double x, double t)
{
  return std::abs(lorentz_boost({t, x}, b).t - t);
}

double x_star_closed_form(double v, double c, double threshold, double t)
{
  const BoostParams b{v, c};
  b.validate();
  const double g = b.gamma();
  return c * c * ((g - 1.0) * t + threshold * t) / (g * v);
}

std::vector<ConvergenceRow> nonuniform_convergence_table(const std::vector<double>& v_over_c, double threshold,
                                                         double t, double c)
{
  if (!(threshold > 0.0 && threshold < 1.0)) throw DomainError("threshold must lie in (0, 1)");
  if (!(t > 0.0)) throw DomainError("t must be positive");
  std::vector<ConvergenceRow> rows;
  for (double beta : v_over_c) {
    const BoostParams b{beta * c, c};
    b.validate();
    if (!(beta > 0.0)) throw DomainError("v/c must be positive");
    auto rel = [&](double x) { return simultaneity_residual(b, x, t) / t; };
    double lo = 0.0;
    if (rel(lo) >= threshold) {
      rows.push_back({beta, 0.0});
      continue;
    }
    double hi = c * t / beta;
    while (rel(hi) < threshold) hi *= 2.0;
    // On [0, hi] the residual first grows through the threshold; bisect for the crossing.
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rel(mid) >= threshold ? hi : lo) = mid;
    }
    rows.push_back({beta, hi});
  }
  return rows;
}

double composed_boost_velocity(double v1, double v2, double c)
{
  // Boost matrices acting on (ct, x).
  auto matrix = [c](double v, double m[2][2]) {
    const BoostParams b{v, c};
    b.validate();
    const double g = b.gamma();
    const double beta = v / c;
    m[0][0] = g;
    m[0][1] = -g * beta;
    m[1][0] = -g * beta;
    m[1][1] = g;
  };
  double a[2][2], b[2][2];
  matrix(v1, a);
  matrix(v2, b);
  const double g = b[0][0] * a[0][0] + b[0][1] * a[1][0];
  const double gb = b[1][0] * a[0][0] + b[1][1] * a[1][0];
  return -c * gb / g;
}

BoostComposition boost_composition_check(double v1, double v2, double c)
{
  BoostParams{v1, c}.validate();
  BoostParams{v2, c}.validate();
  BoostComposition r;
  r.relativistic = (v1 + v2) / (1.0 + v1 * v2 / (c * c));
  r.galilean = v1 + v2;
  r.discrepancy = std::abs(r.galilean - r.relativistic);
  r.galilean_unphysical = std::abs(r.galilean) >= c;
  return r;
}

DomainConditions domain_conditions(double v, double v_prime, double x, double t, double c,
                                   const DomainThresholds& th)
{
  if (!(c > 0.0)) throw DomainError("c must be positive");
  DomainConditions d;
  d.frame_speed_small = std::abs(v) / c < th.frame_speed;
  if (t != 0.0) d.simultaneity_small = std::abs(v * x / (c * c * t)) < th.simultaneity;
  d.body_speed_small = std::abs(v_prime) / c < th.body_speed;
  return d;
}

} // namespace reductcheck
