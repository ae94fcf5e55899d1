#pragma once

// Data-parallel inner loops shared by the grid, density-matrix and trajectory
// code. Every kernel has an OpenMP version (namespace kernels) and a plain
// serial reference (namespace kernels::serial) with the same contract; the
// tests check they agree and bench/ times them against each other.
//
// Reductions are blocked with a fixed block size and combined in block order,
// so results are bit-identical for any thread count.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <span>

namespace reductcheck::kernels {

using cplx = std::complex<double>;

inline constexpr std::size_t reduction_block = 4096;

/// psi[j] *= factor[j]
void multiply(std::span<cplx> psi, std::span<const cplx> factor);

/// psi[j] *= exp(-i * scale * angle[j])
void apply_phase(std::span<cplx> psi, std::span<const double> angle, double scale);

/// Sum of weight[j] * |psi[j]|^2; an empty weight means unit weights.
double weighted_density_sum(std::span<const cplx> psi, std::span<const double> weight);

/// rho(i,j) *= exp(-rate * (x[i] - x[j])^2)
void damp_coherences(Eigen::Ref<Eigen::MatrixXcd> rho, std::span<const double> x, double rate);

/// out(i,j) = (x[i] - x[j])^2 * rho(i,j), i.e. [X,[X,rho]] for diagonal X.
void double_commutator_x(const Eigen::MatrixXcd& rho, std::span<const double> x, Eigen::MatrixXcd& out);

/// Piecewise-linear interpolation of a nodal field (nodes x0 + i*dx) at each
/// position; positions beyond the end nodes take the end value.
void sample_linear(std::span<const double> field, double x0, double dx,
                   std::span<const double> positions, std::span<double> out);

/// Bilinear interpolation of a row-major n0 x n1 nodal field at interleaved
/// (x, y) positions; out has one value per position pair.
void sample_bilinear(std::span<const double> field, std::size_t n0, std::size_t n1,
                     double x0, double dx, double y0, double dy,
                     std::span<const double> positions, std::span<double> out);

/// Cubic Hermite interpolation of complex nodal values f with nodal
/// derivatives df at each position; positions beyond the end nodes take the
/// end value.
void sample_hermite(std::span<const cplx> f, std::span<const cplx> df, double x0, double dx,
                    std::span<const double> positions, std::span<cplx> out);

namespace serial {

void multiply(std::span<cplx> psi, std::span<const cplx> factor);
void apply_phase(std::span<cplx> psi, std::span<const double> angle, double scale);
double weighted_density_sum(std::span<const cplx> psi, std::span<const double> weight);
void damp_coherences(Eigen::Ref<Eigen::MatrixXcd> rho, std::span<const double> x, double rate);
void double_commutator_x(const Eigen::MatrixXcd& rho, std::span<const double> x, Eigen::MatrixXcd& out);
void sample_linear(std::span<const double> field, double x0, double dx,
                   std::span<const double> positions, std::span<double> out);
void sample_bilinear(std::span<const double> field, std::size_t n0, std::size_t n1,
                     double x0, double dx, double y0, double dy,
                     std::span<const double> positions, std::span<double> out);
void sample_hermite(std::span<const cplx> f, std::span<const cplx> df, double x0, double dx,
                    std::span<const double> positions, std::span<cplx> out);

} // namespace serial

} // namespace reductcheck::kernels
