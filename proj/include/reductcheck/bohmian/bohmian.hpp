#pragma once

#include "reductcheck/quantum/wavefunction.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace reductcheck {

struct VelocityField {
  GridSpec grid;
  /// Velocity component per axis at every node.
  std::array<std::vector<double>, 2> v;
  /// 1 where |psi|^2 < eps_node * peak; those nodes carry the nearest unmasked value.
  std::vector<std::uint8_t> nodal_mask;
};

/// v = Im(psi* grad psi) / (m |psi|^2) with a spectral gradient.
VelocityField velocity_field(const GridWavefunction& psi, double eps_node = 1e-12);

/// Configurations as interleaved coordinates (dim values per point).
struct BohmianEnsemble {
  int dim = 1;
  std::vector<double> positions;
  std::uint64_t seed = 0;

  std::size_t size() const { return positions.size() / static_cast<std::size_t>(dim); }
};

/// Each node owns the cell [x_i - dx/2, x_i + dx/2) with weight |psi_i|^2.
/// 1D draws by inverse CDF, 2D by rejection; deterministic in the seed.
BohmianEnsemble sample_born(const GridWavefunction& psi, std::size_t n, std::uint64_t seed);

/// Kolmogorov-Smirnov distance to the cell distribution of |psi|^2 (largest
/// over the two marginals in 2D).
double equivariance_distance(const BohmianEnsemble& ensemble, const GridWavefunction& psi);

struct TrajectoryLog {
  int dim = 1;
  std::vector<double> times;
  /// Ensemble indices of the logged trajectories.
  std::vector<std::size_t> ids;
  /// Interleaved positions of the logged trajectories at each logged time.
  std::vector<std::vector<double>> frames;
  /// Per logged trajectory: came within one cell of a nodal node.
  std::vector<std::uint8_t> near_node;
};

struct AdvanceOptions {
  std::size_t log_cap = 200;
  std::size_t log_stride = 1;
  double eps_node = 1e-12;
  /// Absolute local error bound of the adaptive 1D substeps.
  double step_tolerance = 1e-9;
};

struct BohmianRun {
  BohmianEnsemble ensemble;
  TrajectoryLog log;
  GridWavefunction psi;
};

/// psi is advanced in lockstep with the split-operator propagator; between two
/// states the velocity field is interpolated linearly in time. On a line each
/// trajectory follows that field with adaptive embedded Runge-Kutta substeps;
/// in a plane with one RK2 midpoint step.
/// A trajectory leaving the grid raises NumericalError naming it.
BohmianRun advance_trajectories(const QuantumModel& model, const GridWavefunction& psi0,
                                const BohmianEnsemble& ensemble, double t, double dt,
                                const AdvanceOptions& options = {});

/// Q = -lap(R) / (2 m R) with R = |psi| and a spectral Laplacian; masked nodes
/// (|psi|^2 < eps_node * peak) are set to 0 and flagged in *mask when given.
std::vector<double> quantum_potential(const GridWavefunction& psi, double eps_node = 1e-12,
                                      std::vector<std::uint8_t>* mask = nullptr);

struct CrossingViolation {
  std::size_t step = 0;
  std::size_t first = 0;
  std::size_t second = 0;
};

struct CrossingResult {
  bool holds = true;
  std::optional<CrossingViolation> violation;
};

/// The initial ordering of 1D trajectories is kept at every logged step;
/// reversals by less than `tol` are tolerated.
CrossingResult no_crossing_check(const TrajectoryLog& log, double tol);

struct SupportRegion {
  /// Component label per node, -1 outside the support.
  std::vector<int> component;
  int n_components = 0;
  std::size_t n_cells = 0;
};

/// Nodes where |psi| > eps, split into connected components (4-neighbour in 2D).
SupportRegion epsilon_support(const GridWavefunction& psi, double eps);

/// Component label of the node nearest to a point, -1 when outside.
int support_label_at(const SupportRegion& region, const GridSpec& grid, std::array<double, 2> point);

struct NewtonLawCheck {
  /// max |m q'' + grad V + grad Q| / max(|grad V|, |grad Q|) over used points
  double max_relative = 0.0;
  std::size_t used = 0;
  std::size_t skipped = 0;
};

/// Evaluates the Bohmian Newton law along 1D trajectories. Velocities, grad Q
/// and q'' = dv/dt + v dv/dx (dv/dt by a central difference in time) come from
/// trigonometric interpolation of psi at each trajectory point, so the fringes
/// of a collision are resolved. Points where max(|grad V|, |grad Q|) is below
/// `floor` or where the density is below density_floor times its peak (near
/// nodes) are skipped.
NewtonLawCheck bohmian_newton_check(const QuantumModel& model, const GridWavefunction& psi0,
                                    const BohmianEnsemble& ensemble, double t, double dt, double floor,
                                    double density_floor = 1e-2);

struct TwoPacketParams {
  GridSpec grid = GridSpec::line(-32.0, 32.0, 256);
  double mass = 1.0;
  double p = 3.0;
  double separation = 8.0;
  double width = 1.0;
  double dt = 2.5e-3;
  double t_end = 4.0;
  std::size_t n_trajectories = 200;
  std::size_t n_equivariance = 10000;
  std::uint64_t seed = 7;
  /// Relative amplitude threshold for the packets' epsilon-supports.
  double support_eps = 1e-3;
  // Environment coordinate (2D runs only).
  double env_lo = -16.0;
  double env_hi = 16.0;
  std::size_t env_points = 128;
  double env_mass = 100.0;
  double env_width = 1.0;
  double env_separation_widths = 10.0;
  /// Both branches share one environment state.
  bool identical_environment = false;
};

struct TwoPacketReport {
  bool with_environment = false;
  std::size_t n_trajectories = 0;
  std::size_t n_in_support = 0;
  /// Fraction of support-starting trajectories ending on their starting side of x=0.
  double reversed_fraction = 0.0;
  double pass_through_fraction = 0.0;
  bool no_crossing = true;
  double ks_initial = 0.0;
  double ks_final = 0.0;
  /// Trajectories whose environment coordinate left its starting y-support.
  std::size_t env_migrations = 0;
  std::size_t near_node = 0;
  double norm_drift = 0.0;
  TrajectoryLog log;
};

/// psi = (|q1,p> + |q2,-p>)/sqrt2 on a line, or the same with orthogonal
/// environment factors on a second axis. Throws ConfigError when the packets
/// are not disjoint at the support threshold.
TwoPacketReport two_packet_scenario(bool with_environment, const TwoPacketParams& params);

} // namespace reductcheck
