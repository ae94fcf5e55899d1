#include "reductcheck/quantum/models.hpp"

#include "reductcheck/error.hpp"

#include <cmath>
#include <random>

namespace reductcheck {

NormedState to_state(const GridWavefunction& psi, const std::string& space)
{
  NormedState x;
  x.space = space;
  x.coords = Eigen::Map<const Eigen::VectorXcd>(psi.psi.data(), static_cast<Eigen::Index>(psi.psi.size()));
  return x;
}

GridWavefunction to_wavefunction(const NormedState& x, const GridSpec& grid, std::array<double, 2> mass)
{
  if (static_cast<std::size_t>(x.coords.size()) != grid.size()) {
    throw DomainError("state of space '" + x.space + "' does not match the grid");
  }
  GridWavefunction w;
  w.grid = grid;
  w.mass = mass;
  w.psi.assign(x.coords.data(), x.coords.data() + x.coords.size());
  return w;
}

NormedState to_state(const PhaseState& s, const std::string& space)
{
  NormedState x;
  x.space = space;
  const Eigen::Index n = s.q.size();
  x.coords.resize(2 * n);
  x.coords.head(n) = s.q.cast<cplx>();
  x.coords.tail(n) = s.p.cast<cplx>();
  return x;
}

PhaseState to_phase(const NormedState& x)
{
  const Eigen::Index n = x.coords.size() / 2;
  return PhaseState{x.coords.head(n).real(), x.coords.tail(n).real()};
}

DynamicalModel quantum_dynamical_model(const std::string& id, const QuantumModel& model, double dt)
{
  // Validate the step once up front so configuration errors surface here.
  SchrodingerPropagator probe(model, dt);
  (void)probe;

  DynamicalModel m;
  m.id = id;
  m.dimension = model.grid.size();
  const double cell = model.grid.cell();
  m.norm = [cell](const NormedState& a, const NormedState& b) {
    return std::sqrt((a.coords - b.coords).squaredNorm() * cell);
  };
  m.trajectory = [id, model, dt](std::span<const double> times, const NormedState& x0) {
    SchrodingerPropagator prop(model, dt);
    GridWavefunction w = to_wavefunction(x0, model.grid, model.mass);
    std::vector<NormedState> out;
    out.reserve(times.size());
    double now = 0.0;
    for (double t : times) {
      if (t < now) throw DomainError("trajectory times must be sorted and nonnegative");
      prop.advance(w, t - now);
      now = t;
      require_contained(w, id.c_str());
      out.push_back(to_state(w, id));
    }
    return out;
  };
  return m;
}

DynamicalModel classical_dynamical_model(const std::string& id, const HamiltonianModel& model, double dt,
                                         double q_scale, double p_scale)
{
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  DynamicalModel m;
  m.id = id;
  m.dimension = 2 * model.n_coords();
  m.norm = weighted_sup_norm(q_scale, p_scale);
  m.trajectory = [id, model, dt](std::span<const double> times, const NormedState& x0) {
    PhaseState s = to_phase(x0);
    std::vector<NormedState> out;
    out.reserve(times.size());
    double now = 0.0;
    for (double t : times) {
      if (t < now) throw DomainError("trajectory times must be sorted and nonnegative");
      if (t > now) s = evolve_classical(model, s, t - now, dt).state;
      now = t;
      out.push_back(to_state(s, id));
    }
    return out;
  };
  m.vector_field = [id, model](const NormedState& x) {
    return to_state(hamiltonian_vector_field(model, to_phase(x)), id);
  };
  return m;
}

Sampler fixture_sampler(std::vector<NormedState> fixtures,
                        std::function<NormedState(const NormedState&, std::uint64_t)> perturb)
{
  return [fixtures = std::move(fixtures), perturb = std::move(perturb)](std::uint64_t seed, std::size_t n) {
    std::vector<NormedState> out;
    if (fixtures.empty()) return out;
    std::mt19937_64 rng(seed);
    for (std::size_t k = 0; k < n; ++k) {
      if (k < fixtures.size()) out.push_back(fixtures[k]);
      else if (perturb) out.push_back(perturb(fixtures[k % fixtures.size()], rng()));
      else break;
    }
    return out;
  };
}

BridgeMap expectation_bridge(const std::string& low_id, const std::string& high_id, const GridSpec& grid,
                             std::array<double, 2> mass, Sampler sampler, double max_width)
{
  BridgeMap b;
  b.low_model_id = low_id;
  b.high_model_id = high_id;
  b.sampler = std::move(sampler);
  b.map = [grid, mass, high_id](const NormedState& x) {
    const Moments m = expectation_xp(to_wavefunction(x, grid, mass));
    NormedState y;
    y.space = high_id;
    y.coords.resize(2 * grid.dim);
    for (int a = 0; a < grid.dim; ++a) {
      y.coords[a] = m.x[a];
      y.coords[grid.dim + a] = m.p[a];
    }
    return y;
  };
  b.predicate = [grid, mass, max_width, low_id](const NormedState& x) {
    if (x.space != low_id || static_cast<std::size_t>(x.coords.size()) != grid.size()) return false;
    const GridWavefunction w = to_wavefunction(x, grid, mass);
    if (std::abs(w.norm() - 1.0) > 1e-6 || boundary_fraction(w) > 1e-8) return false;
    for (int a = 0; a < grid.dim; ++a) {
      if (position_stdev(w, a) > max_width) return false;
    }
    return true;
  };
  return b;
}

BridgeMap center_of_mass_bridge(const std::string& low_id, const std::string& high_id, std::array<double, 2> masses,
                                Sampler sampler)
{
  const double total = masses[0] + masses[1];
  BridgeMap b;
  b.low_model_id = low_id;
  b.high_model_id = high_id;
  b.sampler = std::move(sampler);
  b.map = [masses, total, high_id](const NormedState& x) {
    const PhaseState s = to_phase(x);
    PhaseState c;
    c.q = Eigen::VectorXd::Constant(1, (masses[0] * s.q[0] + masses[1] * s.q[1]) / total);
    c.p = Eigen::VectorXd::Constant(1, s.p[0] + s.p[1]);
    return to_state(c, high_id);
  };
  b.predicate = [low_id](const NormedState& x) {
    return x.space == low_id && x.coords.size() == 4 && x.coords.allFinite();
  };
  return b;
}

BridgeMap identity_bridge(const std::string& id, Sampler sampler)
{
  BridgeMap b;
  b.low_model_id = id;
  b.high_model_id = id;
  b.sampler = std::move(sampler);
  b.map = [](const NormedState& x) { return x; };
  b.predicate = [id](const NormedState& x) { return x.space == id && x.coords.allFinite(); };
  return b;
}

SymmetryTransform quantum_translation(const GridSpec& grid, std::array<double, 2> mass, std::array<double, 2> a)
{
  SymmetryTransform s;
  s.name = "translation";
  s.params = {a[0], a[1]};
  s.action = [grid, mass, a](const NormedState& x, double) {
    return to_state(translate_wavefunction(to_wavefunction(x, grid, mass), a), x.space);
  };
  return s;
}

SymmetryTransform classical_translation(const Eigen::VectorXd& a)
{
  SymmetryTransform s;
  s.name = "translation";
  s.params.assign(a.data(), a.data() + a.size());
  s.action = [a](const NormedState& x, double) { return to_state(apply_translation(to_phase(x), a), x.space); };
  return s;
}

SymmetryTransform quantum_boost(const GridSpec& grid, std::array<double, 2> mass, std::array<double, 2> v)
{
  SymmetryTransform s;
  s.name = "boost";
  s.params = {v[0], v[1]};
  s.time_dependent = true;
  s.action = [grid, mass, v](const NormedState& x, double t) {
    return to_state(boost_wavefunction(to_wavefunction(x, grid, mass), v, t), x.space);
  };
  return s;
}

SymmetryTransform classical_boost(const Eigen::VectorXd& v, const std::vector<double>& masses)
{
  SymmetryTransform s;
  s.name = "boost";
  s.params.assign(v.data(), v.data() + v.size());
  s.time_dependent = true;
  s.action = [v, masses](const NormedState& x, double t) {
    return to_state(apply_galilean_boost(to_phase(x), v, t, masses), x.space);
  };
  return s;
}

SymmetryTransform quantum_rotation(const GridSpec& grid, std::array<double, 2> mass, double theta,
                                   std::shared_ptr<double> max_error)
{
  SymmetryTransform s;
  s.name = "rotation";
  s.params = {theta};
  s.action = [grid, mass, theta, max_error](const NormedState& x, double) {
    RotationResult r = rotate_wavefunction_2d(to_wavefunction(x, grid, mass), theta);
    if (max_error) *max_error = std::max(*max_error, r.interpolation_error);
    return to_state(r.psi, x.space);
  };
  return s;
}

SymmetryTransform classical_rotation(double theta)
{
  SymmetryTransform s;
  s.name = "rotation";
  s.params = {theta};
  s.action = [theta](const NormedState& x, double) {
    return to_state(apply_rotation(to_phase(x), 2, Eigen::Vector3d::UnitZ(), theta), x.space);
  };
  return s;
}

} // namespace reductcheck
