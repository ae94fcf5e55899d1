#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>

namespace reductcheck::kernels::detail {

inline double lerp_at(std::span<const double> field, double x0, double dx, double x)
{
  const std::size_t n = field.size();
  const double s = (x - x0) / dx;
  if (s <= 0.0) return field.front();
  if (s >= static_cast<double>(n - 1)) return field.back();
  const auto i = static_cast<std::size_t>(std::floor(s));
  const double f = s - static_cast<double>(i);
  return (1.0 - f) * field[i] + f * field[i + 1];
}

inline double bilerp_at(std::span<const double> field, std::size_t n0, std::size_t n1,
                        double x0, double dx, double y0, double dy, double x, double y)
{
  const double s = std::clamp((x - x0) / dx, 0.0, static_cast<double>(n0 - 1));
  const double r = std::clamp((y - y0) / dy, 0.0, static_cast<double>(n1 - 1));
  const auto i = std::min(static_cast<std::size_t>(std::floor(s)), n0 - 2);
  const auto j = std::min(static_cast<std::size_t>(std::floor(r)), n1 - 2);
  const double fs = s - static_cast<double>(i);
  const double fr = r - static_cast<double>(j);
  const double f00 = field[i * n1 + j];
  const double f01 = field[i * n1 + j + 1];
  const double f10 = field[(i + 1) * n1 + j];
  const double f11 = field[(i + 1) * n1 + j + 1];
  return (1.0 - fs) * ((1.0 - fr) * f00 + fr * f01) + fs * ((1.0 - fr) * f10 + fr * f11);
}

inline std::complex<double> hermite_at(std::span<const std::complex<double>> f,
                                       std::span<const std::complex<double>> df, double x0, double dx, double x)
{
  const std::size_t n = f.size();
  const double s = (x - x0) / dx;
  if (s <= 0.0) return f.front();
  if (s >= static_cast<double>(n - 1)) return f.back();
  const auto i = static_cast<std::size_t>(std::floor(s));
  const double u = s - static_cast<double>(i);
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * f[i] + h10 * dx * df[i] + h01 * f[i + 1] + h11 * dx * df[i + 1];
}

} // namespace reductcheck::kernels::detail
