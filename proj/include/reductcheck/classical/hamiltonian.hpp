#pragma once

#include "reductcheck/potential.hpp"

#include <Eigen/Dense>

#include <vector>

namespace reductcheck {

/// Phase-space point; q and p hold particle-major coordinates (length dim * N).
struct PhaseState {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
};

struct HamiltonianModel {
  std::vector<double> masses;
  int spatial_dim = 1;
  Potential potential;

  std::size_t n_particles() const { return masses.size(); }
  std::size_t n_coords() const { return masses.size() * static_cast<std::size_t>(spatial_dim); }
  /// Mass of the particle owning coordinate i.
  double coord_mass(std::size_t i) const { return masses[i / static_cast<std::size_t>(spatial_dim)]; }

  /// Throws ConfigError on non-positive masses or a gradient that disagrees
  /// with a central difference of the potential at `probe`.
  void validate(const Eigen::VectorXd& probe) const;
};

struct ClassicalRun {
  PhaseState state;
  /// max |E(t_k) - E(0)| / |E(0)| over the steps (absolute when E(0)=0).
  double energy_drift = 0.0;
};

/// Velocity Verlet with n = ceil(t/dt) steps of size t/n.
ClassicalRun evolve_classical(const HamiltonianModel& model, const PhaseState& state, double t, double dt);

double energy(const HamiltonianModel& model, const PhaseState& state);

/// Right-hand side (dq/dt, dp/dt) = (p/m, -grad V).
PhaseState hamiltonian_vector_field(const HamiltonianModel& model, const PhaseState& state);

/// Rigid rotation of every particle's q and p. In 2D the axis is ignored; in 3D
/// it is normalized.
PhaseState apply_rotation(const PhaseState& state, int spatial_dim, const Eigen::Vector3d& axis, double angle);

/// q_i -> q_i - v t, p_i -> p_i - m_i v; v has spatial_dim components.
PhaseState apply_galilean_boost(const PhaseState& state, const Eigen::VectorXd& v, double t,
                                const std::vector<double>& masses);

/// q_i -> q_i + a for every particle; a has spatial_dim components.
PhaseState apply_translation(const PhaseState& state, const Eigen::VectorXd& a);

} // namespace reductcheck
