#include "reductcheck/kernels.hpp"

#include "interp.hpp"

#include <cmath>

namespace reductcheck::kernels::serial {

void multiply(std::span<cplx> psi, std::span<const cplx> factor)
{
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= factor[j];
}

void apply_phase(std::span<cplx> psi, std::span<const double> angle, double scale)
{
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= std::polar(1.0, -scale * angle[j]);
}

double weighted_density_sum(std::span<const cplx> psi, std::span<const double> weight)
{
  double total = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    total += (weight.empty() ? 1.0 : weight[j]) * std::norm(psi[j]);
  }
  return total;
}

void damp_coherences(Eigen::Ref<Eigen::MatrixXcd> rho, std::span<const double> x, double rate)
{
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double u = x[i] - x[j];
      rho(i, j) *= std::exp(-rate * u * u);
    }
  }
}

void double_commutator_x(const Eigen::MatrixXcd& rho, std::span<const double> x, Eigen::MatrixXcd& out)
{
  const auto n = static_cast<Eigen::Index>(x.size());
  out.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double u = x[i] - x[j];
      out(i, j) = (u * u) * rho(i, j);
    }
  }
}

void sample_linear(std::span<const double> field, double x0, double dx,
                   std::span<const double> positions, std::span<double> out)
{
  for (std::size_t k = 0; k < positions.size(); ++k) {
    out[k] = detail::lerp_at(field, x0, dx, positions[k]);
  }
}

void sample_bilinear(std::span<const double> field, std::size_t n0, std::size_t n1,
                     double x0, double dx, double y0, double dy,
                     std::span<const double> positions, std::span<double> out)
{
  for (std::size_t k = 0; k < positions.size() / 2; ++k) {
    out[k] = detail::bilerp_at(field, n0, n1, x0, dx, y0, dy, positions[2 * k], positions[2 * k + 1]);
  }
}

void sample_hermite(std::span<const cplx> f, std::span<const cplx> df, double x0, double dx,
                    std::span<const double> positions, std::span<cplx> out)
{
  for (std::size_t k = 0; k < positions.size(); ++k) {
    out[k] = detail::hermite_at(f, df, x0, dx, positions[k]);
  }
}

} // namespace reductcheck::kernels::serial
