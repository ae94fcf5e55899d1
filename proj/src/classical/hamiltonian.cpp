#include "reductcheck/classical/hamiltonian.hpp"

#include "reductcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace reductcheck {

namespace {

std::span<const double> view(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<double> view(Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void force(const HamiltonianModel& model, const Eigen::VectorXd& q, Eigen::VectorXd& f)
{
  f.resize(q.size());
  model.potential.gradient(view(q), view(f));
  f = -f;
  if (!f.allFinite()) throw NumericalError("non-finite force in potential '" + model.potential.name + "'");
}

} // namespace

void HamiltonianModel::validate(const Eigen::VectorXd& probe) const
{
  if (masses.empty()) throw ConfigError("model needs at least one particle");
  for (double m : masses) {
    if (!(m > 0.0)) throw ConfigError("masses must be positive");
  }
  if (spatial_dim < 1 || spatial_dim > 3) throw ConfigError("spatial_dim must be 1, 2 or 3");
  if (static_cast<std::size_t>(probe.size()) != n_coords()) throw ConfigError("probe has the wrong length");

  Eigen::VectorXd g(probe.size());
  potential.gradient(view(probe), view(g));
  for (Eigen::Index i = 0; i < probe.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(probe[i]));
    Eigen::VectorXd a = probe;
    Eigen::VectorXd b = probe;
    a[i] += h;
    b[i] -= h;
    const double fd = (potential.value(view(a)) - potential.value(view(b))) / (2.0 * h);
    const double scale = std::max({std::abs(fd), std::abs(g[i]), 1e-8});
    if (std::abs(fd - g[i]) / scale > 1e-6) {
      throw ConfigError("gradient of potential '" + potential.name + "' disagrees with its value");
    }
  }
}

double energy(const HamiltonianModel& model, const PhaseState& state)
{
  double kinetic = 0.0;
  for (Eigen::Index i = 0; i < state.p.size(); ++i) {
    kinetic += state.p[i] * state.p[i] / (2.0 * model.coord_mass(static_cast<std::size_t>(i)));
  }
  return kinetic + model.potential.value(view(state.q));
}

ClassicalRun evolve_classical(const HamiltonianModel& model, const PhaseState& state, double t, double dt)
{
  if (!(dt > 0.0) || !(t >= 0.0)) throw DomainError("evolve_classical needs dt > 0 and t >= 0");
  if (model.potential.quadratic && model.potential.max_curvature > 0.0) {
    const double m_min = *std::min_element(model.masses.begin(), model.masses.end());
    const double period = 2.0 * M_PI / std::sqrt(model.potential.max_curvature / m_min);
    if (dt > period / 20.0) throw DomainError("dt exceeds 1/20 of the shortest oscillation period");
  }
  ClassicalRun run{state, 0.0};
  if (t == 0.0) return run;

  const auto n = static_cast<long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(n);
  const std::size_t nc = model.n_coords();
  Eigen::VectorXd inv_m(nc);
  for (std::size_t i = 0; i < nc; ++i) inv_m[i] = 1.0 / model.coord_mass(i);

  const double e0 = energy(model, state);
  const double e_scale = std::abs(e0) > 0.0 ? std::abs(e0) : 1.0;
  Eigen::VectorXd f;
  force(model, run.state.q, f);
  for (long k = 0; k < n; ++k) {
    run.state.p += 0.5 * h * f;
    run.state.q += h * run.state.p.cwiseProduct(inv_m);
    force(model, run.state.q, f);
    run.state.p += 0.5 * h * f;
    run.energy_drift = std::max(run.energy_drift, std::abs(energy(model, run.state) - e0) / e_scale);
  }
  if (!run.state.q.allFinite() || !run.state.p.allFinite()) {
    throw NumericalError("classical evolution blew up");
  }
  return run;
}

PhaseState hamiltonian_vector_field(const HamiltonianModel& model, const PhaseState& state)
{
  PhaseState d;
  d.q.resize(state.p.size());
  for (Eigen::Index i = 0; i < state.p.size(); ++i) d.q[i] = state.p[i] / model.coord_mass(static_cast<std::size_t>(i));
  force(model, state.q, d.p);
  return d;
}

PhaseState apply_rotation(const PhaseState& state, int spatial_dim, const Eigen::Vector3d& axis, double angle)
{
  if (spatial_dim != 2 && spatial_dim != 3) throw DomainError("rotations need spatial_dim 2 or 3");
  Eigen::MatrixXd r;
  if (spatial_dim == 2) {
    r = Eigen::Rotation2Dd(angle).toRotationMatrix();
  } else {
    if (axis.norm() == 0.0) throw DomainError("rotation axis must be nonzero");
    r = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  }
  PhaseState out = state;
  const Eigen::Index d = spatial_dim;
  for (Eigen::Index i = 0; i + d <= state.q.size(); i += d) {
    out.q.segment(i, d) = r * state.q.segment(i, d);
    out.p.segment(i, d) = r * state.p.segment(i, d);
  }
  return out;
}

PhaseState apply_galilean_boost(const PhaseState& state, const Eigen::VectorXd& v, double t,
                                const std::vector<double>& masses)
{
  PhaseState out = state;
  const Eigen::Index d = v.size();
  if (d == 0 || state.q.size() != d * static_cast<Eigen::Index>(masses.size())) {
    throw DomainError("boost velocity does not match the state layout");
  }
  for (std::size_t a = 0; a < masses.size(); ++a) {
    const Eigen::Index i = static_cast<Eigen::Index>(a) * d;
    out.q.segment(i, d) -= v * t;
    out.p.segment(i, d) -= masses[a] * v;
  }
  return out;
}

PhaseState apply_translation(const PhaseState& state, const Eigen::VectorXd& a)
{
  PhaseState out = state;
  const Eigen::Index d = a.size();
  if (d == 0 || state.q.size() % d != 0) throw DomainError("translation does not match the state layout");
  for (Eigen::Index i = 0; i < state.q.size(); i += d) out.q.segment(i, d) += a;
  return out;
}

} // namespace reductcheck
