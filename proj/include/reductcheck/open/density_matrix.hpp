#pragma once

#include "reductcheck/quantum/grid.hpp"

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

namespace reductcheck {

/// rho(x_i, x_j) in discrete normalization: trace = sum_i rho_ii = 1.
struct DensityMatrixGrid {
  GridSpec grid;
  Eigen::MatrixXcd rho;
  double mass = 1.0;
};

enum class MasterEquation { caldeira_leggett, pure_decoherence };

/// System operators on a 1D grid of at most 256 points. An infinite mass drops
/// the kinetic term.
struct OpenModel {
  GridSpec grid;
  double mass = 1.0;
  Potential potential;
  double lambda = 0.0;
  double eta = 0.0;
  double omega = 0.0;
  double kT = 0.0;

  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> dv;
  /// Spectral derivative operator -i d/dx as a dense Hermitian matrix.
  Eigen::MatrixXcd p;
  /// P^2/2m + V(X)
  Eigen::MatrixXcd h_system;

  /// Coefficient of -[X,[X,rho]] in d(rho)/dt for the given equation.
  double decoherence_coefficient(MasterEquation eq) const;
};

OpenModel make_open_model(const GridSpec& grid, double mass, Potential potential, double lambda, double eta = 0.0,
                          double omega = 0.0, double kT = 0.0);

/// |psi><psi| from amplitudes in continuum normalization.
DensityMatrixGrid density_from_wavefunction(const GridWavefunction& psi);

struct OpenRun {
  DensityMatrixGrid state;
  /// max |trace - 1| over the run.
  double trace_drift = 0.0;
  /// Largest anti-Hermitian part removed by re-symmetrization.
  double hermiticity_drift = 0.0;
};

/// d(rho)/dt for the chosen master equation.
Eigen::MatrixXcd master_rhs(const OpenModel& model, MasterEquation eq, const Eigen::MatrixXcd& rho);

/// RK4 integration of
///   i d(rho)/dt = [H + M Omega^2 X^2 / 2, rho] - i Lambda eta kT [X,[X,rho]] + eta/2M [X,{P,rho}]
/// with Hermiticity restored every step. Trace drift above 1e-6 raises NumericalError.
OpenRun evolve_caldeira_leggett(const OpenModel& model, const DensityMatrixGrid& rho, double t, double dt);

/// i d(rho)/dt = [H, rho] - i Lambda [X,[X,rho]] by Strang splitting with the
/// exact unitary and the exact elementwise decay factor.
OpenRun evolve_pure_decoherence(const OpenModel& model, const DensityMatrixGrid& rho, double t, double dt);

struct Widths {
  /// stdev of |rho| along u = x - x', summed over x + x'
  double coherence_length = 0.0;
  /// stdev of the diagonal
  double ensemble_width = 0.0;
};

Widths widths(const DensityMatrixGrid& rho);

double purity(const DensityMatrixGrid& rho);

struct OpenEhrenfest {
  /// |Tr([X,[X,rho]] P)|
  double trace_identity = 0.0;
  /// |d<P>/dt + Tr(rho V'(X))|, derivative by central RK4 steps of size `step`
  double newton = 0.0;
  /// |Tr(rho V'(X)) - V'(<X>)|
  double strong = 0.0;
};

OpenEhrenfest open_ehrenfest_residual(const OpenModel& model, MasterEquation eq, const DensityMatrixGrid& rho,
                                      double step = 1e-4);

/// Least-squares rate r of values ~ A exp(-r t).
double fit_decay_rate(std::span<const double> times, std::span<const double> values);

} // namespace reductcheck
