#pragma once

// Shared helpers for the unit tests: a seeded property driver and a few
// dense-matrix oracles that do not go through the library's FFT paths.

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <string>

namespace testing {

using cplx = std::complex<double>;

/// Draws from a fixed-seed engine; each property case gets its own stream.
class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }
  std::uint64_t bits() { return rng_(); }
  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

/// Runs `prop` on `cases` generated inputs; a failing case reports its index
/// and seed so it can be replayed alone.
inline void for_all(std::uint64_t seed, int cases, const std::function<void(Gen&)>& prop)
{
  for (int i = 0; i < cases; ++i) {
    const std::uint64_t s = seed * 1000003ULL + static_cast<std::uint64_t>(i);
    CAPTURE(i);
    CAPTURE(s);
    Gen g(s);
    prop(g);
  }
}

inline Eigen::MatrixXcd random_hermitian(Gen& g, Eigen::Index d, double scale = 1.0)
{
  Eigen::MatrixXcd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = cplx(g.normal(), g.normal());
  return 0.5 * scale * (a + a.adjoint());
}

inline Eigen::VectorXcd random_unit(Gen& g, Eigen::Index d)
{
  Eigen::VectorXcd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = cplx(g.normal(), g.normal());
  return v / v.norm();
}

/// Unitary DFT matrix with the FFTW sign convention (forward exp(-2 pi i jk/n)).
inline Eigen::MatrixXcd dft_matrix(Eigen::Index n)
{
  Eigen::MatrixXcd f(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < n; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                           -2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n));
  return f;
}

} // namespace testing
