#pragma once

// Adapters exposing grid wavefunctions and classical phase space as
// DynamicalModels, the bridge maps between them, and their symmetry actions.
// State-space tags are the model ids.

#include "reductcheck/classical/hamiltonian.hpp"
#include "reductcheck/core/reduction.hpp"
#include "reductcheck/quantum/wavefunction.hpp"

#include <limits>
#include <memory>

namespace reductcheck {

NormedState to_state(const GridWavefunction& psi, const std::string& space);
GridWavefunction to_wavefunction(const NormedState& x, const GridSpec& grid, std::array<double, 2> mass);
/// Phase-space coordinates laid out as (q..., p...).
NormedState to_state(const PhaseState& s, const std::string& space);
PhaseState to_phase(const NormedState& x);

/// Schroedinger dynamics on the model grid. Norm: L2 distance of amplitudes.
/// Trajectories fail with DomainError if the packet reaches the grid edge.
DynamicalModel quantum_dynamical_model(const std::string& id, const QuantumModel& model, double dt);

/// Velocity-Verlet dynamics under the weighted sup norm of phase space.
DynamicalModel classical_dynamical_model(const std::string& id, const HamiltonianModel& model, double dt,
                                         double q_scale = 1.0, double p_scale = 1.0);

using Sampler = std::function<std::vector<NormedState>(std::uint64_t seed, std::size_t n)>;

/// Sampler that returns the first n fixtures, then seeded perturbations of
/// them produced by `perturb(fixture, rng_draw)` until n states are drawn.
Sampler fixture_sampler(std::vector<NormedState> fixtures,
                        std::function<NormedState(const NormedState&, std::uint64_t)> perturb = nullptr);

/// psi -> (<x>, <p>) per axis. Domain: normalized within 1e-6, contained on
/// the grid, and every position stdev at most max_width.
BridgeMap expectation_bridge(const std::string& low_id, const std::string& high_id, const GridSpec& grid,
                             std::array<double, 2> mass, Sampler sampler,
                             double max_width = std::numeric_limits<double>::infinity());

/// Two particles on a line -> their centre of mass (Q, P).
BridgeMap center_of_mass_bridge(const std::string& low_id, const std::string& high_id, std::array<double, 2> masses,
                                Sampler sampler);

BridgeMap identity_bridge(const std::string& id, Sampler sampler);

// Symmetry actions. Quantum versions need the grid and masses to rebuild the
// wavefunction from its coordinates.
SymmetryTransform quantum_translation(const GridSpec& grid, std::array<double, 2> mass, std::array<double, 2> a);
SymmetryTransform classical_translation(const Eigen::VectorXd& a);
/// Boost by v per axis; time-dependent.
SymmetryTransform quantum_boost(const GridSpec& grid, std::array<double, 2> mass, std::array<double, 2> v);
SymmetryTransform classical_boost(const Eigen::VectorXd& v, const std::vector<double>& masses);
/// Rotation about the grid centre; the largest interpolation error seen is
/// accumulated into *max_error when given.
SymmetryTransform quantum_rotation(const GridSpec& grid, std::array<double, 2> mass, double theta,
                                   std::shared_ptr<double> max_error = nullptr);
SymmetryTransform classical_rotation(double theta);

} // namespace reductcheck
