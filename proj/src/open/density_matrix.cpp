#include "reductcheck/open/density_matrix.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace reductcheck {

namespace {

constexpr std::size_t max_points = 256;

Eigen::MatrixXcd dft_matrix(std::size_t n)
{
  Eigen::MatrixXcd f(n, n);
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = -2.0 * M_PI * static_cast<double>((j * k) % n) / static_cast<double>(n);
      f(j, k) = std::polar(s, angle);
    }
  }
  return f;
}

cplx trace(const Eigen::MatrixXcd& rho) { return rho.trace(); }

double anti_hermitian_part(const Eigen::MatrixXcd& rho)
{
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff() * 0.5;
}

void symmetrize(Eigen::MatrixXcd& rho) { rho = 0.5 * (rho + rho.adjoint()).eval(); }

void check_state(const OpenModel& model, const DensityMatrixGrid& rho)
{
  const auto n = static_cast<Eigen::Index>(model.grid.n[0]);
  if (rho.rho.rows() != n || rho.rho.cols() != n) throw DomainError("density matrix does not match the model grid");
}

void track(OpenRun& run, Eigen::MatrixXcd& rho)
{
  run.hermiticity_drift = std::max(run.hermiticity_drift, anti_hermitian_part(rho));
  symmetrize(rho);
  const double drift = std::abs(trace(rho) - 1.0);
  if (!std::isfinite(drift)) throw NumericalError("non-finite density matrix");
  run.trace_drift = std::max(run.trace_drift, drift);
  if (drift > 1e-6) throw NumericalError("trace drift " + std::to_string(drift) + " exceeds 1e-6");
}

} // namespace

double OpenModel::decoherence_coefficient(MasterEquation eq) const
{
  return eq == MasterEquation::pure_decoherence ? lambda : lambda * eta * kT;
}

OpenModel make_open_model(const GridSpec& grid, double mass, Potential potential, double lambda, double eta,
                          double omega, double kT)
{
  grid.validate();
  if (grid.dim != 1) throw ConfigError("open models use a 1D grid");
  if (grid.n[0] > max_points) throw ConfigError("density-matrix grids are capped at 256 points");
  if (!(mass > 0.0)) throw ConfigError("mass must be positive");
  for (double c : {lambda, eta, omega, kT}) {
    if (!std::isfinite(c) || c < 0.0) throw ConfigError("open-model coefficients must be finite and nonnegative");
  }
  OpenModel m;
  m.grid = grid;
  m.mass = mass;
  m.potential = std::move(potential);
  m.lambda = lambda;
  m.eta = eta;
  m.omega = omega;
  m.kT = kT;

  const std::size_t n = grid.n[0];
  m.x = grid.coordinates(0);
  m.v.resize(n);
  m.dv.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xi[] = {m.x[i]};
    double g[] = {0.0};
    m.v[i] = m.potential.value(xi);
    m.potential.gradient(xi, g);
    m.dv[i] = g[0];
  }

  const Eigen::MatrixXcd f = dft_matrix(n);
  Eigen::VectorXcd k(n);
  Eigen::VectorXcd k2(n);
  for (std::size_t j = 0; j < n; ++j) {
    k[j] = grid.k(0, j);
    k2[j] = grid.k(0, j) * grid.k(0, j);
  }
  m.p = f.adjoint() * k.asDiagonal() * f;
  m.h_system = Eigen::MatrixXcd::Zero(n, n);
  if (std::isfinite(mass)) m.h_system = f.adjoint() * (k2 / (2.0 * mass)).asDiagonal() * f;
  for (std::size_t i = 0; i < n; ++i) m.h_system(i, i) += m.v[i];
  m.p = 0.5 * (m.p + m.p.adjoint()).eval();
  m.h_system = 0.5 * (m.h_system + m.h_system.adjoint()).eval();
  return m;
}

DensityMatrixGrid density_from_wavefunction(const GridWavefunction& psi)
{
  if (psi.grid.dim != 1) throw DomainError("density matrices need a 1D wavefunction");
  DensityMatrixGrid d;
  d.grid = psi.grid;
  d.mass = psi.mass[0];
  const Eigen::Map<const Eigen::VectorXcd> a(psi.psi.data(), static_cast<Eigen::Index>(psi.psi.size()));
  d.rho = (a * a.adjoint()) * psi.grid.dx(0);
  return d;
}

Eigen::MatrixXcd master_rhs(const OpenModel& model, MasterEquation eq, const Eigen::MatrixXcd& rho)
{
  const cplx i(0.0, 1.0);
  Eigen::MatrixXcd h = model.h_system;
  if (eq == MasterEquation::caldeira_leggett && model.omega > 0.0 && std::isfinite(model.mass)) {
    for (Eigen::Index j = 0; j < h.rows(); ++j) h(j, j) += 0.5 * model.mass * model.omega * model.omega * model.x[j] * model.x[j];
  }
  Eigen::MatrixXcd out = -i * (h * rho - rho * h);

  const double c = model.decoherence_coefficient(eq);
  if (c != 0.0) {
    Eigen::MatrixXcd dc;
    kernels::double_commutator_x(rho, model.x, dc);
    out -= c * dc;
  }
  if (eq == MasterEquation::caldeira_leggett && model.eta > 0.0 && std::isfinite(model.mass)) {
    const Eigen::MatrixXcd anti = model.p * rho + rho * model.p;
    Eigen::MatrixXcd comm(anti.rows(), anti.cols());
    for (Eigen::Index b = 0; b < anti.cols(); ++b) {
      for (Eigen::Index a = 0; a < anti.rows(); ++a) comm(a, b) = (model.x[a] - model.x[b]) * anti(a, b);
    }
    out -= i * (model.eta / (2.0 * model.mass)) * comm;
  }
  return out;
}

OpenRun evolve_caldeira_leggett(const OpenModel& model, const DensityMatrixGrid& rho0, double t, double dt)
{
  check_state(model, rho0);
  if (!(dt > 0.0) || !(t >= 0.0)) throw DomainError("evolve needs dt > 0 and t >= 0");
  const double km = model.grid.k_max(0);
  if (std::isfinite(model.mass) && dt * km * km / (2.0 * model.mass) >= 0.5) {
    throw DomainError("dt does not resolve the largest kinetic phase");
  }
  const double span = model.grid.hi[0] - model.grid.lo[0];
  if (dt * model.decoherence_coefficient(MasterEquation::caldeira_leggett) * span * span > 2.5) {
    throw DomainError("dt too large for the decoherence rate across the grid");
  }
  OpenRun run{rho0, 0.0, 0.0};
  if (t == 0.0) return run;
  const auto n = static_cast<long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(n);
  const auto eq = MasterEquation::caldeira_leggett;
  Eigen::MatrixXcd& r = run.state.rho;
  for (long s = 0; s < n; ++s) {
    const Eigen::MatrixXcd k1 = master_rhs(model, eq, r);
    const Eigen::MatrixXcd k2 = master_rhs(model, eq, r + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = master_rhs(model, eq, r + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = master_rhs(model, eq, r + h * k3);
    r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    track(run, r);
  }
  return run;
}

OpenRun evolve_pure_decoherence(const OpenModel& model, const DensityMatrixGrid& rho0, double t, double dt)
{
  check_state(model, rho0);
  if (!(dt > 0.0) || !(t >= 0.0)) throw DomainError("evolve needs dt > 0 and t >= 0");
  OpenRun run{rho0, 0.0, 0.0};
  if (t == 0.0) return run;
  const auto n = static_cast<long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(n);

  const bool unitary = model.h_system.cwiseAbs().maxCoeff() > 0.0;
  Eigen::MatrixXcd u_half;
  if (unitary) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(model.h_system);
    Eigen::VectorXcd phase(eig.eigenvalues().size());
    for (Eigen::Index j = 0; j < phase.size(); ++j) phase[j] = std::polar(1.0, -0.5 * h * eig.eigenvalues()[j]);
    u_half = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();
  }
  const double rate = model.lambda * h;
  Eigen::MatrixXcd& r = run.state.rho;
  for (long s = 0; s < n; ++s) {
    if (unitary) r = u_half * r * u_half.adjoint();
    kernels::damp_coherences(r, model.x, rate);
    if (unitary) r = u_half * r * u_half.adjoint();
    track(run, r);
  }
  return run;
}

Widths widths(const DensityMatrixGrid& d)
{
  const auto n = static_cast<Eigen::Index>(d.grid.n[0]);
  const double dx = d.grid.dx(0);
  Widths w;
  double mass = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double p = d.rho(i, i).real();
    const double x = d.grid.x(0, static_cast<std::size_t>(i));
    mass += p;
    m1 += p * x;
    m2 += p * x * x;
  }
  const double mean = m1 / mass;
  w.ensemble_width = std::sqrt(std::max(0.0, m2 / mass - mean * mean));

  double total = 0.0;
  double second = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = std::abs(d.rho(i, j));
      const double u = static_cast<double>(i - j) * dx;
      total += a;
      second += a * u * u;
    }
  }
  w.coherence_length = total > 0.0 ? std::sqrt(second / total) : 0.0;
  return w;
}

double purity(const DensityMatrixGrid& d) { return d.rho.cwiseAbs2().sum(); }

OpenEhrenfest open_ehrenfest_residual(const OpenModel& model, MasterEquation eq, const DensityMatrixGrid& d,
                                      double step)
{
  check_state(model, d);
  OpenEhrenfest out;
  Eigen::MatrixXcd dc;
  kernels::double_commutator_x(d.rho, model.x, dc);
  out.trace_identity = std::abs((dc * model.p).trace());

  auto rk4 = [&](const Eigen::MatrixXcd& r, double h) {
    const Eigen::MatrixXcd k1 = master_rhs(model, eq, r);
    const Eigen::MatrixXcd k2 = master_rhs(model, eq, r + 0.5 * h * k1);
    const Eigen::MatrixXcd k3 = master_rhs(model, eq, r + 0.5 * h * k2);
    const Eigen::MatrixXcd k4 = master_rhs(model, eq, r + h * k3);
    return Eigen::MatrixXcd(r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  };
  const double p_fwd = (rk4(d.rho, step) * model.p).trace().real();
  const double p_bwd = (rk4(d.rho, -step) * model.p).trace().real();
  const double dpdt = (p_fwd - p_bwd) / (2.0 * step);

  double force = 0.0;
  double mean_x = 0.0;
  double tr = 0.0;
  for (Eigen::Index i = 0; i < d.rho.rows(); ++i) {
    const double p = d.rho(i, i).real();
    force += p * model.dv[i];
    mean_x += p * model.x[i];
    tr += p;
  }
  force /= tr;
  mean_x /= tr;
  out.newton = std::abs(dpdt + force);
  const double at_mean[] = {mean_x};
  double g[] = {0.0};
  model.potential.gradient(at_mean, g);
  out.strong = std::abs(force - g[0]);
  return out;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> values)
{
  if (times.size() != values.size() || times.size() < 2) throw DomainError("fit needs at least two points");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  const double n = static_cast<double>(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(values[k] > 0.0)) throw DomainError("fit needs positive values");
    const double y = std::log(values[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
  }
  const double den = n * stt - st * st;
  if (den == 0.0) throw DomainError("fit needs distinct times");
  return -(n * sty - st * sy) / den;
}

} // namespace reductcheck
