#pragma once

#include "reductcheck/quantum/grid.hpp"

#include <array>
#include <vector>

namespace reductcheck {

/// psi ~ exp(i p0 x) exp(-(x-x0)^2 / 2L^2), normalized. Requires x0 at least
/// 5L inside the grid and L >= 3 dx.
GridWavefunction make_gaussian(const GridSpec& grid, double x0, double p0, double width, double mass);

/// Product of two such Gaussians on a 2D grid, one per axis.
GridWavefunction make_gaussian_2d(const GridSpec& grid, std::array<double, 2> x0, std::array<double, 2> p0,
                                  std::array<double, 2> width, std::array<double, 2> mass);

/// Largest |psi|^2 on the outermost nodes divided by the peak |psi|^2.
double boundary_fraction(const GridWavefunction& psi);
/// Throws DomainError when boundary_fraction exceeds 1e-8.
void require_contained(const GridWavefunction& psi, const char* what);

/// Strang split-operator propagator (half potential, kinetic in k-space, half
/// potential) with factors cached for the current substep.
class SchrodingerPropagator {
public:
  SchrodingerPropagator(const QuantumModel& model, double dt);

  /// Advances psi by t (n = ceil(t/dt) substeps of t/n); negative t runs
  /// backwards. Returns |norm_after/norm_before - 1|; above 1e-8 a warning is
  /// logged, above 1e-6 NumericalError is thrown.
  double advance(GridWavefunction& psi, double t);

  const QuantumModel& model() const { return model_; }
  double dt() const { return dt_; }

private:
  void prepare(double h);

  QuantumModel model_;
  double dt_;
  double h_ = 0.0;
  std::vector<double> kinetic_;
  std::vector<cplx> half_v_;
  std::vector<cplx> full_v_;
  std::vector<cplx> kin_;
};

/// Convenience wrapper over SchrodingerPropagator.
double evolve_schrodinger(const QuantumModel& model, GridWavefunction& psi, double t, double dt);

struct Moments {
  std::array<double, 2> x{0.0, 0.0};
  std::array<double, 2> p{0.0, 0.0};
};

/// <x> by real-space quadrature and <p> by spectral quadrature, per axis.
Moments expectation_xp(const GridWavefunction& psi);

double position_stdev(const GridWavefunction& psi, int axis);
double momentum_stdev(const GridWavefunction& psi, int axis);

/// <H> with the kinetic part evaluated spectrally.
double energy_expectation(const QuantumModel& model, const GridWavefunction& psi);

/// <a|b> with the grid volume element.
cplx overlap(const GridWavefunction& a, const GridWavefunction& b);

/// Spectral derivative of psi along `axis`.
std::vector<cplx> spectral_gradient(const GridWavefunction& psi, int axis);

struct EhrenfestResiduals {
  /// |d<p>/dt + <dV/dx>|, derivative by a central difference of split steps.
  double exact = 0.0;
  /// |<dV/dx> - dV/dx(<x>)|
  double strong = 0.0;
};

/// Largest residual over the axes. `step` is the finite-difference step.
EhrenfestResiduals ehrenfest_residuals(const QuantumModel& model, const GridWavefunction& psi, double step = 1e-4);

/// psi(x) -> psi(x - a) by spectral shift.
GridWavefunction translate_wavefunction(const GridWavefunction& psi, std::array<double, 2> a);

/// Galilean boost by v per axis at time t:
/// psi'(x) = exp(-i(m v x + m v^2 t / 2)) psi(x + v t).
GridWavefunction boost_wavefunction(const GridWavefunction& psi, std::array<double, 2> v, double t);

struct RotationResult {
  GridWavefunction psi;
  /// |norm before renormalization - 1|
  double interpolation_error = 0.0;
};

/// Rigid rotation about the grid center by bilinear interpolation, renormalized.
RotationResult rotate_wavefunction_2d(const GridWavefunction& psi, double theta);

/// Free-packet width a(t) = sqrt(a0^2 + 4 t^2 hbar^2 / (m^2 a0^2)), a = 2 * stdev.
double free_spreading_width(double a0, double mass, double t, double hbar = 1.0);

struct Persistence {
  double t_spread = 0.0;
  double distance = 0.0;
};

/// Time for a free packet to spread from a0 to a_max, and the distance covered at `speed`.
Persistence persistence_estimate(double a0, double a_max, double mass, double speed, double hbar = 1.0);

} // namespace reductcheck
