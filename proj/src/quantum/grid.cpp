#include "reductcheck/quantum/grid.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/kernels.hpp"

#include <bit>
#include <cmath>
#include <span>

namespace reductcheck {

GridSpec GridSpec::line(double lo, double hi, std::size_t n)
{
  GridSpec g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 0.0};
  g.n = {n, 1};
  g.validate();
  return g;
}

GridSpec GridSpec::plane(double lo0, double hi0, std::size_t n0, double lo1, double hi1, std::size_t n1)
{
  GridSpec g;
  g.dim = 2;
  g.lo = {lo0, lo1};
  g.hi = {hi0, hi1};
  g.n = {n0, n1};
  g.validate();
  return g;
}

void GridSpec::validate() const
{
  if (dim != 1 && dim != 2) throw ConfigError("grid dimension must be 1 or 2");
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 64 || !std::has_single_bit(n[a])) {
      throw ConfigError("grid axis needs a power-of-two point count >= 64");
    }
    if (!(hi[a] > lo[a])) throw ConfigError("grid axis needs hi > lo");
  }
}

double GridSpec::k(int axis, std::size_t i) const
{
  const auto m = static_cast<long>(n[axis]);
  auto j = static_cast<long>(i);
  if (j >= m / 2) j -= m;
  return 2.0 * M_PI * static_cast<double>(j) / (hi[axis] - lo[axis]);
}

std::vector<std::size_t> GridSpec::shape() const
{
  if (dim == 1) return {n[0]};
  return {n[0], n[1]};
}

std::vector<double> GridSpec::coordinates(int axis) const
{
  std::vector<double> c(size());
  if (dim == 1) {
    for (std::size_t i = 0; i < n[0]; ++i) c[i] = x(0, i);
    return c;
  }
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) c[i * n[1] + j] = axis == 0 ? x(0, i) : x(1, j);
  }
  return c;
}

std::vector<double> GridSpec::wavenumbers(int axis) const
{
  std::vector<double> c(size());
  if (dim == 1) {
    for (std::size_t i = 0; i < n[0]; ++i) c[i] = k(0, i);
    return c;
  }
  for (std::size_t i = 0; i < n[0]; ++i) {
    for (std::size_t j = 0; j < n[1]; ++j) c[i * n[1] + j] = axis == 0 ? k(0, i) : k(1, j);
  }
  return c;
}

double GridSpec::k_max(int axis) const { return M_PI / dx(axis); }

std::array<double, 2> GridSpec::point(std::size_t flat) const
{
  if (dim == 1) return {x(0, flat), 0.0};
  return {x(0, flat / n[1]), x(1, flat % n[1])};
}

double GridWavefunction::norm() const
{
  return std::sqrt(kernels::weighted_density_sum(psi, {}) * grid.cell());
}

QuantumModel make_quantum_model(const GridSpec& grid, std::array<double, 2> mass, Potential potential)
{
  grid.validate();
  for (int a = 0; a < grid.dim; ++a) {
    if (!(mass[a] > 0.0)) throw ConfigError("masses must be positive");
  }
  QuantumModel m;
  m.grid = grid;
  m.mass = mass;
  m.potential = std::move(potential);
  m.v.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto p = grid.point(j);
    m.v[j] = m.potential.value(std::span<const double>(p.data(), static_cast<std::size_t>(grid.dim)));
    if (!std::isfinite(m.v[j])) throw ConfigError("potential is not finite on the grid");
  }
  return m;
}

} // namespace reductcheck
