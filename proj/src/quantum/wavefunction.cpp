#include "reductcheck/quantum/wavefunction.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/fft.hpp"
#include "reductcheck/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <span>

namespace reductcheck {

namespace {

const FftPlan& plan_for(const GridSpec& g) { return FftPlan::for_shape(g.shape()); }

void normalize(GridWavefunction& w)
{
  const double nrm = w.norm();
  if (!(nrm > 0.0)) throw NumericalError("cannot normalize a zero wavefunction");
  for (auto& a : w.psi) a /= nrm;
}

double gaussian_factor_check(const GridSpec& g, int axis, double x0, double width)
{
  if (!(width >= 3.0 * g.dx(axis))) throw DomainError("packet width below 3 grid spacings");
  if (x0 - 5.0 * width < g.lo[axis] || x0 + 5.0 * width > g.hi[axis]) {
    throw DomainError("packet centre closer than 5 widths to the grid edge");
  }
  return width;
}

} // namespace

GridWavefunction make_gaussian(const GridSpec& grid, double x0, double p0, double width, double mass)
{
  if (grid.dim != 1) throw DomainError("make_gaussian needs a 1D grid");
  if (!(mass > 0.0)) throw DomainError("mass must be positive");
  gaussian_factor_check(grid, 0, x0, width);
  GridWavefunction w;
  w.grid = grid;
  w.mass = {mass, mass};
  w.psi.resize(grid.size());
  for (std::size_t i = 0; i < grid.n[0]; ++i) {
    const double x = grid.x(0, i);
    const double u = (x - x0) / width;
    w.psi[i] = std::polar(std::exp(-0.5 * u * u), p0 * x);
  }
  normalize(w);
  return w;
}

GridWavefunction make_gaussian_2d(const GridSpec& grid, std::array<double, 2> x0, std::array<double, 2> p0,
                                  std::array<double, 2> width, std::array<double, 2> mass)
{
  if (grid.dim != 2) throw DomainError("make_gaussian_2d needs a 2D grid");
  for (int a = 0; a < 2; ++a) {
    if (!(mass[a] > 0.0)) throw DomainError("mass must be positive");
    gaussian_factor_check(grid, a, x0[a], width[a]);
  }
  GridWavefunction w;
  w.grid = grid;
  w.mass = mass;
  w.psi.resize(grid.size());
  for (std::size_t i = 0; i < grid.n[0]; ++i) {
    const double x = grid.x(0, i);
    const double u = (x - x0[0]) / width[0];
    for (std::size_t j = 0; j < grid.n[1]; ++j) {
      const double y = grid.x(1, j);
      const double r = (y - x0[1]) / width[1];
      w.psi[i * grid.n[1] + j] = std::polar(std::exp(-0.5 * (u * u + r * r)), p0[0] * x + p0[1] * y);
    }
  }
  normalize(w);
  return w;
}

double boundary_fraction(const GridWavefunction& w)
{
  const GridSpec& g = w.grid;
  double peak = 0.0;
  for (const auto& a : w.psi) peak = std::max(peak, std::norm(a));
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  if (g.dim == 1) {
    edge = std::max(std::norm(w.psi.front()), std::norm(w.psi.back()));
  } else {
    const std::size_t n0 = g.n[0];
    const std::size_t n1 = g.n[1];
    for (std::size_t j = 0; j < n1; ++j) {
      edge = std::max({edge, std::norm(w.psi[j]), std::norm(w.psi[(n0 - 1) * n1 + j])});
    }
    for (std::size_t i = 0; i < n0; ++i) {
      edge = std::max({edge, std::norm(w.psi[i * n1]), std::norm(w.psi[i * n1 + n1 - 1])});
    }
  }
  return edge / peak;
}

void require_contained(const GridWavefunction& psi, const char* what)
{
  const double f = boundary_fraction(psi);
  if (f > 1e-8) {
    throw DomainError(std::string(what) + ": packet not contained (boundary density " + std::to_string(f) +
                      " of peak)");
  }
}

SchrodingerPropagator::SchrodingerPropagator(const QuantumModel& model, double dt)
  : model_(model), dt_(dt)
{
  if (!(dt > 0.0)) throw DomainError("dt must be positive");
  model_.grid.validate();
  if (model_.v.size() != model_.grid.size()) throw ConfigError("potential not sampled on the model grid");
  double kmax_phase = 0.0;
  for (int a = 0; a < model_.grid.dim; ++a) {
    const double km = model_.grid.k_max(a);
    kmax_phase += km * km / (2.0 * model_.mass[a]);
  }
  if (dt * kmax_phase >= 0.5) {
    throw DomainError("dt does not resolve the largest kinetic phase (dt*kmax^2/2m >= 0.5)");
  }
  kinetic_.assign(model_.grid.size(), 0.0);
  for (int a = 0; a < model_.grid.dim; ++a) {
    const auto k = model_.grid.wavenumbers(a);
    for (std::size_t j = 0; j < k.size(); ++j) kinetic_[j] += k[j] * k[j] / (2.0 * model_.mass[a]);
  }
}

void SchrodingerPropagator::prepare(double h)
{
  if (h == h_ && !kin_.empty()) return;
  h_ = h;
  const std::size_t n = model_.grid.size();
  half_v_.resize(n);
  full_v_.resize(n);
  kin_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    half_v_[j] = std::polar(1.0, -0.5 * h * model_.v[j]);
    full_v_[j] = std::polar(1.0, -h * model_.v[j]);
    kin_[j] = std::polar(1.0, -h * kinetic_[j]);
  }
}

double SchrodingerPropagator::advance(GridWavefunction& w, double t)
{
  if (w.psi.size() != model_.grid.size()) throw DomainError("wavefunction does not match the model grid");
  if (t == 0.0) return 0.0;
  const auto n = static_cast<long>(std::ceil(std::abs(t) / dt_ - 1e-12));
  prepare(t / static_cast<double>(n));

  const double before = w.norm();
  const FftPlan& plan = plan_for(model_.grid);
  std::span<cplx> data(w.psi);
  kernels::multiply(data, half_v_);
  for (long s = 0; s < n; ++s) {
    plan.forward(data);
    kernels::multiply(data, kin_);
    plan.backward(data);
    kernels::multiply(data, s + 1 < n ? std::span<const cplx>(full_v_) : std::span<const cplx>(half_v_));
  }
  const double after = w.norm();
  if (!std::isfinite(after)) throw NumericalError("non-finite wavefunction during split-operator evolution");
  const double drift = std::abs(after / before - 1.0);
  if (drift > 1e-6) throw NumericalError("norm drift " + std::to_string(drift) + " exceeds 1e-6");
  if (drift > 1e-8) std::clog << "warning: split-operator norm drift " << drift << "\n";
  return drift;
}

double evolve_schrodinger(const QuantumModel& model, GridWavefunction& psi, double t, double dt)
{
  if (!(t >= 0.0)) throw DomainError("evolve_schrodinger needs t >= 0");
  SchrodingerPropagator prop(model, dt);
  return prop.advance(psi, t);
}

Moments expectation_xp(const GridWavefunction& w)
{
  const GridSpec& g = w.grid;
  Moments m;
  const double mass = kernels::weighted_density_sum(w.psi, {});
  std::vector<cplx> spec = w.psi;
  plan_for(g).forward(spec);
  const double spec_mass = kernels::weighted_density_sum(spec, {});
  for (int a = 0; a < g.dim; ++a) {
    m.x[a] = kernels::weighted_density_sum(w.psi, g.coordinates(a)) / mass;
    m.p[a] = kernels::weighted_density_sum(spec, g.wavenumbers(a)) / spec_mass;
  }
  return m;
}

double position_stdev(const GridWavefunction& w, int axis)
{
  const auto x = w.grid.coordinates(axis);
  std::vector<double> x2(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) x2[j] = x[j] * x[j];
  const double mass = kernels::weighted_density_sum(w.psi, {});
  const double mean = kernels::weighted_density_sum(w.psi, x) / mass;
  const double second = kernels::weighted_density_sum(w.psi, x2) / mass;
  return std::sqrt(std::max(0.0, second - mean * mean));
}

double momentum_stdev(const GridWavefunction& w, int axis)
{
  std::vector<cplx> spec = w.psi;
  plan_for(w.grid).forward(spec);
  const auto k = w.grid.wavenumbers(axis);
  std::vector<double> k2(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) k2[j] = k[j] * k[j];
  const double mass = kernels::weighted_density_sum(spec, {});
  const double mean = kernels::weighted_density_sum(spec, k) / mass;
  const double second = kernels::weighted_density_sum(spec, k2) / mass;
  return std::sqrt(std::max(0.0, second - mean * mean));
}

double energy_expectation(const QuantumModel& model, const GridWavefunction& w)
{
  std::vector<cplx> spec = w.psi;
  plan_for(w.grid).forward(spec);
  std::vector<double> kinetic(w.grid.size(), 0.0);
  for (int a = 0; a < w.grid.dim; ++a) {
    const auto k = w.grid.wavenumbers(a);
    for (std::size_t j = 0; j < k.size(); ++j) kinetic[j] += k[j] * k[j] / (2.0 * model.mass[a]);
  }
  const double t = kernels::weighted_density_sum(spec, kinetic) / kernels::weighted_density_sum(spec, {});
  const double v = kernels::weighted_density_sum(w.psi, model.v) / kernels::weighted_density_sum(w.psi, {});
  return t + v;
}

cplx overlap(const GridWavefunction& a, const GridWavefunction& b)
{
  cplx s = 0.0;
  for (std::size_t j = 0; j < a.psi.size(); ++j) s += std::conj(a.psi[j]) * b.psi[j];
  return s * a.grid.cell();
}

std::vector<cplx> spectral_gradient(const GridWavefunction& w, int axis)
{
  std::vector<cplx> d = w.psi;
  const FftPlan& plan = plan_for(w.grid);
  plan.forward(d);
  const auto k = w.grid.wavenumbers(axis);
  const double nyquist = -w.grid.k_max(axis);
  for (std::size_t j = 0; j < d.size(); ++j) {
    // The Nyquist mode has no well-defined odd derivative; drop it.
    d[j] *= k[j] == nyquist ? cplx(0.0) : cplx(0.0, k[j]);
  }
  plan.backward(d);
  return d;
}

EhrenfestResiduals ehrenfest_residuals(const QuantumModel& model, const GridWavefunction& w, double step)
{
  const GridSpec& g = w.grid;
  const std::size_t n = g.size();
  const int dim = g.dim;
  std::vector<std::vector<double>> grad(dim, std::vector<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = g.point(j);
    double gv[2] = {0.0, 0.0};
    model.potential.gradient(std::span<const double>(p.data(), dim), std::span<double>(gv, dim));
    for (int a = 0; a < dim; ++a) grad[a][j] = gv[a];
  }
  const Moments m0 = expectation_xp(w);

  SchrodingerPropagator prop(model, step);
  GridWavefunction fwd = w;
  GridWavefunction bwd = w;
  prop.advance(fwd, step);
  prop.advance(bwd, -step);
  const Moments mf = expectation_xp(fwd);
  const Moments mb = expectation_xp(bwd);

  double gv_at_mean[2] = {0.0, 0.0};
  model.potential.gradient(std::span<const double>(m0.x.data(), dim), std::span<double>(gv_at_mean, dim));

  EhrenfestResiduals r;
  const double mass = kernels::weighted_density_sum(w.psi, {});
  for (int a = 0; a < dim; ++a) {
    const double mean_force = kernels::weighted_density_sum(w.psi, grad[a]) / mass;
    const double dpdt = (mf.p[a] - mb.p[a]) / (2.0 * step);
    r.exact = std::max(r.exact, std::abs(dpdt + mean_force));
    r.strong = std::max(r.strong, std::abs(mean_force - gv_at_mean[a]));
  }
  return r;
}

GridWavefunction translate_wavefunction(const GridWavefunction& w, std::array<double, 2> a)
{
  GridWavefunction out = w;
  const FftPlan& plan = plan_for(w.grid);
  plan.forward(out.psi);
  std::vector<double> angle(w.grid.size(), 0.0);
  for (int ax = 0; ax < w.grid.dim; ++ax) {
    const auto k = w.grid.wavenumbers(ax);
    for (std::size_t j = 0; j < k.size(); ++j) angle[j] += k[j] * a[ax];
  }
  kernels::apply_phase(out.psi, angle, 1.0);
  plan.backward(out.psi);
  return out;
}

GridWavefunction boost_wavefunction(const GridWavefunction& w, std::array<double, 2> v, double t)
{
  GridWavefunction out = translate_wavefunction(w, {-v[0] * t, -v[1] * t});
  std::vector<double> angle(w.grid.size(), 0.0);
  for (int ax = 0; ax < w.grid.dim; ++ax) {
    const auto x = w.grid.coordinates(ax);
    const double m = w.mass[ax];
    for (std::size_t j = 0; j < x.size(); ++j) angle[j] += m * v[ax] * x[j] + 0.5 * m * v[ax] * v[ax] * t;
  }
  kernels::apply_phase(out.psi, angle, 1.0);
  require_contained(out, "boost_wavefunction");
  return out;
}

RotationResult rotate_wavefunction_2d(const GridWavefunction& w, double theta)
{
  const GridSpec& g = w.grid;
  if (g.dim != 2) throw DomainError("rotate_wavefunction_2d needs a 2D grid");
  const std::size_t n = g.size();
  std::vector<double> re(n), im(n);
  for (std::size_t j = 0; j < n; ++j) {
    re[j] = w.psi[j].real();
    im[j] = w.psi[j].imag();
  }
  const double cx = 0.5 * (g.lo[0] + g.hi[0]);
  const double cy = 0.5 * (g.lo[1] + g.hi[1]);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  std::vector<double> src(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const auto p = g.point(j);
    const double dx = p[0] - cx;
    const double dy = p[1] - cy;
    // Pull back through the inverse rotation.
    src[2 * j] = cx + c * dx + s * dy;
    src[2 * j + 1] = cy - s * dx + c * dy;
  }
  std::vector<double> out_re(n), out_im(n);
  kernels::sample_bilinear(re, g.n[0], g.n[1], g.lo[0], g.dx(0), g.lo[1], g.dx(1), src, out_re);
  kernels::sample_bilinear(im, g.n[0], g.n[1], g.lo[0], g.dx(0), g.lo[1], g.dx(1), src, out_im);

  RotationResult r;
  r.psi = w;
  for (std::size_t j = 0; j < n; ++j) r.psi.psi[j] = {out_re[j], out_im[j]};
  r.interpolation_error = std::abs(r.psi.norm() - 1.0);
  normalize(r.psi);
  require_contained(r.psi, "rotate_wavefunction_2d");
  return r;
}

double free_spreading_width(double a0, double mass, double t, double hbar)
{
  if (!(a0 > 0.0)) throw DomainError("a0 must be positive");
  const double s = 2.0 * t * hbar / (mass * a0);
  return std::sqrt(a0 * a0 + s * s);
}

Persistence persistence_estimate(double a0, double a_max, double mass, double speed, double hbar)
{
  if (!(a_max >= a0) || !(a0 > 0.0)) throw DomainError("persistence_estimate needs a_max >= a0 > 0");
  Persistence p;
  p.t_spread = (mass * a0 / (2.0 * hbar)) * std::sqrt(a_max * a_max - a0 * a0);
  p.distance = speed * p.t_spread;
  return p;
}

} // namespace reductcheck
