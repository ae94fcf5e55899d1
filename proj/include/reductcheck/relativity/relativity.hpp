#pragma once

#include <optional>
#include <vector>

namespace reductcheck {

/// Event in 1+1 dimensions.
struct Event {
  double t = 0.0;
  double x = 0.0;
};

struct BoostParams {
  double v = 0.0;
  double c = 1.0;

  /// Throws DomainError unless c > 0 and |v| < c.
  void validate() const;
  double gamma() const;
};

Event lorentz_boost(const Event& e, const BoostParams& b);
Event galilean_boost(const Event& e, double v);

/// |t'_Lorentz - t'_Galilean| = |gamma (t - v x / c^2) - t|
double simultaneity_residual(const BoostParams& b, double x, double t);

struct ConvergenceRow {
  double v_over_c = 0.0;
  /// Smallest x >= 0 with residual / t >= threshold.
  double x_star = 0.0;
};

/// x* for each v/c at fixed t and c, by bisection on the relative residual.
std::vector<ConvergenceRow> nonuniform_convergence_table(const std::vector<double>& v_over_c, double threshold,
                                                         double t, double c = 1.0);

/// Closed form of the same root: x* = c^2 ((gamma - 1) t + threshold t) / (gamma v).
double x_star_closed_form(double v, double c, double threshold, double t);

struct BoostComposition {
  double relativistic = 0.0;
  double galilean = 0.0;
  double discrepancy = 0.0;
  /// The Galilean sum reaches or exceeds c.
  bool galilean_unphysical = false;
};

BoostComposition boost_composition_check(double v1, double v2, double c);

/// Velocity of the boost obtained by composing the two boost matrices.
double composed_boost_velocity(double v1, double v2, double c);

struct DomainThresholds {
  double frame_speed = 0.1;
  double simultaneity = 0.1;
  double body_speed = 0.1;
};

struct DomainConditions {
  bool frame_speed_small = false;
  /// Undefined at t = 0.
  std::optional<bool> simultaneity_small;
  bool body_speed_small = false;
};

/// v/c << 1, (v/c^2) x / t << 1 and v'/c << 1 against the thresholds.
DomainConditions domain_conditions(double v, double v_prime, double x, double t, double c,
                                   const DomainThresholds& thresholds);

} // namespace reductcheck
