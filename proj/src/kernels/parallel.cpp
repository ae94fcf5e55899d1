#include "reductcheck/kernels.hpp"

#include "interp.hpp"

#include <cmath>
#include <vector>

namespace reductcheck::kernels {

void multiply(std::span<cplx> psi, std::span<const cplx> factor)
{
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    psi[j] *= factor[j];
  }
}

void apply_phase(std::span<cplx> psi, std::span<const double> angle, double scale)
{
  const auto n = static_cast<std::ptrdiff_t>(psi.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    psi[j] *= std::polar(1.0, -scale * angle[j]);
  }
}

double weighted_density_sum(std::span<const cplx> psi, std::span<const double> weight)
{
  const std::size_t n = psi.size();
  const std::size_t blocks = (n + reduction_block - 1) / reduction_block;
  std::vector<double> partial(blocks, 0.0);
  const bool weighted = !weight.empty();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * reduction_block;
    const std::size_t hi = std::min(n, lo + reduction_block);
    double acc = 0.0;
    for (std::size_t j = lo; j < hi; ++j) {
      acc += (weighted ? weight[j] : 1.0) * std::norm(psi[j]);
    }
    partial[b] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

void damp_coherences(Eigen::Ref<Eigen::MatrixXcd> rho, std::span<const double> x, double rate)
{
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double u = x[i] - x[j];
      rho(i, j) *= std::exp(-rate * u * u);
    }
  }
}

void double_commutator_x(const Eigen::MatrixXcd& rho, std::span<const double> x, Eigen::MatrixXcd& out)
{
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  out.resize(n, n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double u = x[i] - x[j];
      out(i, j) = (u * u) * rho(i, j);
    }
  }
}

void sample_linear(std::span<const double> field, double x0, double dx,
                   std::span<const double> positions, std::span<double> out)
{
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = detail::lerp_at(field, x0, dx, positions[k]);
  }
}

void sample_bilinear(std::span<const double> field, std::size_t n0, std::size_t n1,
                     double x0, double dx, double y0, double dy,
                     std::span<const double> positions, std::span<double> out)
{
  const auto n = static_cast<std::ptrdiff_t>(positions.size() / 2);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = detail::bilerp_at(field, n0, n1, x0, dx, y0, dy, positions[2 * k], positions[2 * k + 1]);
  }
}

void sample_hermite(std::span<const cplx> f, std::span<const cplx> df, double x0, double dx,
                    std::span<const double> positions, std::span<cplx> out)
{
  const auto n = static_cast<std::ptrdiff_t>(positions.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    out[k] = detail::hermite_at(f, df, x0, dx, positions[k]);
  }
}

} // namespace reductcheck::kernels
