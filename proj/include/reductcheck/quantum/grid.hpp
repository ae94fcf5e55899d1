#pragma once

#include "reductcheck/potential.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

namespace reductcheck {

using cplx = std::complex<double>;

/// Uniform periodic grid on [lo, hi) per axis; node i sits at lo + i*dx.
/// Row-major layout: axis 0 is the slow index.
struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<std::size_t, 2> n{1, 1};

  static GridSpec line(double lo, double hi, std::size_t n);
  static GridSpec plane(double lo0, double hi0, std::size_t n0, double lo1, double hi1, std::size_t n1);

  /// Throws ConfigError unless dim is 1 or 2 and every axis has a power-of-two
  /// count of at least 64 points and positive extent.
  void validate() const;

  double dx(int axis) const { return (hi[axis] - lo[axis]) / static_cast<double>(n[axis]); }
  double x(int axis, std::size_t i) const { return lo[axis] + static_cast<double>(i) * dx(axis); }
  /// FFT-ordered angular wavenumber of mode i; the Nyquist mode is negative.
  double k(int axis, std::size_t i) const;
  std::size_t size() const { return dim == 1 ? n[0] : n[0] * n[1]; }
  /// Volume element of one node.
  double cell() const { return dim == 1 ? dx(0) : dx(0) * dx(1); }
  std::vector<std::size_t> shape() const;
  /// Coordinate of `axis` at every node, in storage order.
  std::vector<double> coordinates(int axis) const;
  /// Wavenumber of `axis` at every mode, in storage order.
  std::vector<double> wavenumbers(int axis) const;
  double k_max(int axis) const;
  /// Node coordinates as a point (x) or (x, y).
  std::array<double, 2> point(std::size_t flat) const;
};

/// Amplitudes in continuum normalization: sum |psi|^2 * cell = 1.
struct GridWavefunction {
  GridSpec grid;
  std::vector<cplx> psi;
  /// Mass attached to each axis (per-particle masses for two particles on a line).
  std::array<double, 2> mass{1.0, 1.0};

  double norm() const;
};

struct QuantumModel {
  GridSpec grid;
  std::array<double, 2> mass{1.0, 1.0};
  Potential potential;
  /// Potential sampled at the nodes.
  std::vector<double> v;
};

/// Samples the potential on the grid; throws ConfigError on non-finite values.
QuantumModel make_quantum_model(const GridSpec& grid, std::array<double, 2> mass, Potential potential);

} // namespace reductcheck
