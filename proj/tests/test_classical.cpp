#include "support.hpp"

#include "reductcheck/classical/hamiltonian.hpp"
#include "reductcheck/error.hpp"

#include <boost/numeric/odeint.hpp>

#include <numbers>

using namespace reductcheck;
using testing::Gen;

namespace {

constexpr double pi = std::numbers::pi;

PhaseState phase(std::initializer_list<double> q, std::initializer_list<double> p)
{
  PhaseState s;
  s.q = Eigen::Map<const Eigen::VectorXd>(q.begin(), static_cast<Eigen::Index>(q.size()));
  s.p = Eigen::Map<const Eigen::VectorXd>(p.begin(), static_cast<Eigen::Index>(p.size()));
  return s;
}

/// High-accuracy reference by adaptive Dormand-Prince on (q, p).
PhaseState dopri_reference(const HamiltonianModel& m, const PhaseState& s0, double t)
{
  using Vec = std::vector<double>;
  const std::size_t n = static_cast<std::size_t>(s0.q.size());
  Vec y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = s0.q[static_cast<Eigen::Index>(i)];
    y[n + i] = s0.p[static_cast<Eigen::Index>(i)];
  }
  auto rhs = [&](const Vec& x, Vec& dxdt, double) {
    Vec grad(n);
    m.potential.gradient(std::span<const double>(x.data(), n), grad);
    for (std::size_t i = 0; i < n; ++i) {
      dxdt[i] = x[n + i] / m.coord_mass(i);
      dxdt[n + i] = -grad[i];
    }
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<Vec>()), rhs, y, 0.0, t, 1e-3);
  PhaseState out;
  out.q.resize(static_cast<Eigen::Index>(n));
  out.p.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    out.q[static_cast<Eigen::Index>(i)] = y[i];
    out.p[static_cast<Eigen::Index>(i)] = y[n + i];
  }
  return out;
}

double distance(const PhaseState& a, const PhaseState& b)
{
  return std::max((a.q - b.q).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff());
}

} // namespace

TEST_CASE("energy of simple states")
{
  const HamiltonianModel sho{{1.0}, 1, harmonic_potential(1.0)};
  CHECK(energy(sho, phase({1.0}, {0.0})) == doctest::Approx(0.5));
  const HamiltonianModel free{{1.0}, 1, free_potential()};
  CHECK(energy(free, phase({0.0}, {2.0})) == doctest::Approx(2.0));
}

TEST_CASE("SHO follows q = cos t, p = -sin t")
{
  const HamiltonianModel sho{{1.0}, 1, harmonic_potential(1.0)};
  for (double t : {0.5, pi, 7.0}) {
    const auto r = evolve_classical(sho, phase({1.0}, {0.0}), t, 1e-3);
    CHECK(std::abs(r.state.q[0] - std::cos(t)) < 1e-6);
    CHECK(std::abs(r.state.p[0] + std::sin(t)) < 1e-6);
  }
}

TEST_CASE("quartic endpoint matches the adaptive RK45 reference")
{
  const HamiltonianModel quartic{{1.0}, 1, quartic_potential(1.0)};
  const auto s0 = phase({1.0}, {0.0});
  const auto ref = dopri_reference(quartic, s0, 1.0);
  const auto r = evolve_classical(quartic, s0, 1.0, 1e-4);
  CHECK(distance(r.state, ref) < 1e-7);
}

TEST_CASE("Verlet converges at second order against RK45 on random two-particle systems")
{
  testing::for_all(31, 6, [](Gen& g) {
    const HamiltonianModel m{{g.uniform(0.5, 2.0), g.uniform(0.5, 2.0)}, 1, pair_harmonic_potential(g.uniform(0.5, 2.0))};
    const auto s0 = phase({g.uniform(-1.0, 0.0), g.uniform(0.0, 1.0)}, {g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)});
    const double t = g.uniform(0.5, 3.0);
    const auto ref = dopri_reference(m, s0, t);
    const double e1 = distance(evolve_classical(m, s0, t, 4e-3).state, ref);
    const double e2 = distance(evolve_classical(m, s0, t, 2e-3).state, ref);
    CHECK(e2 < 1e-4);
    // Halving dt cuts the error by about four.
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  });
}

TEST_CASE("Verlet energy has no secular drift over 100 periods")
{
  const HamiltonianModel sho{{1.0}, 1, harmonic_potential(1.0)};
  const double period = 2.0 * pi;
  const double dt = period / 200.0;
  const auto s0 = phase({1.0}, {0.0});
  const double e0 = energy(sho, s0);
  auto period_mean = [&](const PhaseState& start, double& max_dev, PhaseState& end) {
    PhaseState s = start;
    double sum = 0.0;
    for (int k = 0; k < 200; ++k) {
      s = evolve_classical(sho, s, dt, dt).state;
      const double e = energy(sho, s);
      max_dev = std::max(max_dev, std::abs(e - e0) / e0);
      sum += e;
    }
    end = s;
    return sum / 200.0;
  };
  double dev = 0.0;
  PhaseState s = s0, next;
  const double first = period_mean(s, dev, next);
  s = next;
  const auto r = evolve_classical(sho, s, 98.0 * period, dt);
  const double last = period_mean(r.state, dev, next);
  CHECK(std::abs(last - first) / e0 < 1e-6);
  // The bounded oscillation is set by (omega dt)^2.
  CHECK(dev < 0.5 * dt * dt);
  CHECK(r.energy_drift < 0.5 * dt * dt);
}

TEST_CASE("vector field is (p/m, -grad V)")
{
  const HamiltonianModel m{{2.0}, 1, harmonic_potential(3.0)};
  const auto f = hamiltonian_vector_field(m, phase({0.5}, {4.0}));
  CHECK(f.q[0] == doctest::Approx(2.0));
  CHECK(f.p[0] == doctest::Approx(-1.5));
}

TEST_CASE("translations commute with the flow of a pair potential")
{
  testing::for_all(32, 10, [](Gen& g) {
    const HamiltonianModel m{{1.0, 3.0}, 1, pair_harmonic_potential(1.5)};
    const auto s0 = phase({g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)}, {g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)});
    const Eigen::VectorXd a = Eigen::VectorXd::Constant(1, g.uniform(-3.0, 3.0));
    const double t = g.uniform(0.1, 2.0);
    const auto lhs = evolve_classical(m, apply_translation(s0, a), t, 1e-3).state;
    const auto rhs = apply_translation(evolve_classical(m, s0, t, 1e-3).state, a);
    CHECK(distance(lhs, rhs) < 1e-10);
  });
}

TEST_CASE("Galilean boosts map solutions to solutions")
{
  testing::for_all(33, 10, [](Gen& g) {
    const std::vector<double> masses{1.0, 2.0};
    const HamiltonianModel m{masses, 1, pair_harmonic_potential(1.0)};
    const auto s0 = phase({g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)}, {g.uniform(-1.0, 1.0), g.uniform(-1.0, 1.0)});
    const Eigen::VectorXd v = Eigen::VectorXd::Constant(1, g.uniform(-1.0, 1.0));
    const double t = g.uniform(0.1, 2.0);
    const auto lhs = evolve_classical(m, apply_galilean_boost(s0, v, 0.0, masses), t, 1e-3).state;
    const auto rhs = apply_galilean_boost(evolve_classical(m, s0, t, 1e-3).state, v, t, masses);
    CHECK(distance(lhs, rhs) < 1e-9);
  });
}

TEST_CASE("rotations commute with an isotropic flow in 2D and 3D")
{
  testing::for_all(34, 10, [](Gen& g) {
    for (int d : {2, 3}) {
      const HamiltonianModel m{{1.0}, d, harmonic_potential(2.0)};
      PhaseState s0;
      s0.q = Eigen::VectorXd::Random(d);
      s0.p = Eigen::VectorXd::Random(d);
      const Eigen::Vector3d axis(g.normal(), g.normal(), g.normal());
      const double angle = g.uniform(-pi, pi);
      const double t = g.uniform(0.1, 2.0);
      const auto lhs = evolve_classical(m, apply_rotation(s0, d, axis, angle), t, 1e-3).state;
      const auto rhs = apply_rotation(evolve_classical(m, s0, t, 1e-3).state, d, axis, angle);
      CHECK(distance(lhs, rhs) < 1e-10);
      CHECK(energy(m, apply_rotation(s0, d, axis, angle)) == doctest::Approx(energy(m, s0)));
    }
  });
}

TEST_CASE("model validation")
{
  const Eigen::VectorXd probe = Eigen::VectorXd::Constant(1, 0.7);
  HamiltonianModel ok{{1.0}, 1, quartic_potential(1.0)};
  CHECK_NOTHROW(ok.validate(probe));
  HamiltonianModel bad_mass{{0.0}, 1, quartic_potential(1.0)};
  CHECK_THROWS_AS(bad_mass.validate(probe), ConfigError);
  HamiltonianModel bad_grad = ok;
  bad_grad.potential.gradient = [](std::span<const double> q, std::span<double> g) { g[0] = 2.0 * q[0]; };
  CHECK_THROWS_AS(bad_grad.validate(probe), ConfigError);
  CHECK_THROWS_AS(ok.validate(Eigen::VectorXd::Zero(2)), ConfigError);
  CHECK_THROWS_AS(evolve_classical(ok, phase({1.0}, {0.0}), 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(apply_rotation(phase({1.0}, {0.0}), 1, Eigen::Vector3d::UnitZ(), 0.1), DomainError);
}

TEST_CASE("potential registry by name")
{
  const std::vector<double> k{2.0};
  const auto v = potential_by_name("harmonic", k);
  const std::vector<double> q{3.0};
  CHECK(v.value(q) == doctest::Approx(9.0));
  CHECK(potential_by_name("free", {}).value(q) == 0.0);
  CHECK_THROWS_AS(potential_by_name("nope", {}), ConfigError);
}
