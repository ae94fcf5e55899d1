#pragma once

#include <functional>
#include <span>
#include <string>

namespace reductcheck {

/// A scalar potential over a flat coordinate vector (all particles, all axes).
struct Potential {
  std::string name;
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  /// Depends only on the radius about the origin (admits rotations).
  bool rotation_invariant = false;
  /// Depends only on coordinate differences (admits translations and boosts).
  bool translation_invariant = false;
  /// Force is linear in the coordinates.
  bool quadratic = false;
  /// Largest Hessian eigenvalue for quadratic potentials, used for step-size heuristics.
  double max_curvature = 0.0;
};

Potential free_potential();
/// V = k/2 * sum_i (q_i - center)^2
Potential harmonic_potential(double k, double center = 0.0);
/// V = lambda/4 * sum_i q_i^4
Potential quartic_potential(double lambda = 1.0);
/// V = k/2 * (q_0 - q_1)^2 for two particles on a line.
Potential pair_harmonic_potential(double k);

/// Builds a potential from its name and parameters, as used in configs.
/// Names: free, harmonic(k), quartic(lambda), pair_harmonic(k).
Potential potential_by_name(const std::string& name, std::span<const double> params);

} // namespace reductcheck
