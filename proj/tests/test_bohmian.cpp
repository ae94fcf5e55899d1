#include "support.hpp"

#include "reductcheck/bohmian/bohmian.hpp"
#include "reductcheck/error.hpp"

#include <algorithm>
#include <numeric>

using namespace reductcheck;
using testing::Gen;

namespace {

constexpr double pi = std::numbers::pi;

double mean(const std::vector<double>& v)
{
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

TEST_CASE("a Gaussian with momentum p0 flows at p0/m everywhere")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  testing::for_all(71, 6, [&](Gen& gen) {
    const double p0 = gen.uniform(-2.0, 2.0);
    const double m = gen.uniform(0.5, 3.0);
    const auto psi = make_gaussian(g, gen.uniform(-2.0, 2.0), p0, gen.uniform(0.7, 1.5), m);
    const auto f = velocity_field(psi);
    double peak = 0.0;
    for (const auto& z : psi.psi) peak = std::max(peak, std::norm(z));
    double err = 0.0;
    for (std::size_t j = 0; j < f.v[0].size(); ++j) {
      if (std::norm(psi.psi[j]) > 1e-8 * peak) err = std::max(err, std::abs(f.v[0][j] - p0 / m));
    }
    CHECK(err < 1e-8);
  });
}

TEST_CASE("the SHO ground state is at rest and Q + V is its energy")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  const QuantumModel model = make_quantum_model(g, {1.0, 1.0}, harmonic_potential(1.0));
  const auto psi = make_gaussian(g, 0.0, 0.0, 1.0, 1.0);
  const auto f = velocity_field(psi);
  std::vector<std::uint8_t> mask;
  const auto q = quantum_potential(psi, 1e-12, &mask);
  double v_err = 0.0, e_err = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (mask[j]) continue;
    v_err = std::max(v_err, std::abs(f.v[0][j]));
    if (std::abs(g.x(0, j)) < 4.0) e_err = std::max(e_err, std::abs(q[j] + model.v[j] - 0.5));
  }
  CHECK(v_err < 1e-8);
  CHECK(e_err < 1e-4);

  const auto ens = sample_born(psi, 500, 3);
  const auto run = advance_trajectories(model, psi, ens, 1.0, 1e-3);
  double moved = 0.0;
  for (std::size_t i = 0; i < ens.positions.size(); ++i) {
    moved = std::max(moved, std::abs(run.ensemble.positions[i] - ens.positions[i]));
  }
  // The discrete ground state differs from the Gaussian by the grid error only.
  CHECK(moved < 1e-6);
}

TEST_CASE("Born sampling is distributed as |psi|^2 and deterministic in the seed")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  const auto psi = make_gaussian(g, 0.7, 0.4, 1.1, 1.0);
  const auto a = sample_born(psi, 10000, 11);
  CHECK(a.size() == 10000);
  CHECK(equivariance_distance(a, psi) < 0.02);
  const double left = static_cast<double>(std::count_if(a.positions.begin(), a.positions.end(),
                                                        [](double x) { return x < 0.7; })) / 1e4;
  CHECK(std::abs(left - 0.5) < 0.02);
  CHECK(sample_born(psi, 10000, 11).positions == a.positions);
  CHECK(sample_born(psi, 10000, 12).positions != a.positions);
  // A shifted ensemble is far from equivariant.
  auto shifted = a;
  for (auto& x : shifted.positions) x += 1.0;
  CHECK(equivariance_distance(shifted, psi) > 0.3);
}

TEST_CASE("2D sampling matches both marginals")
{
  const GridSpec g = GridSpec::plane(-8.0, 8.0, 64, -8.0, 8.0, 64);
  const auto psi = make_gaussian_2d(g, {1.0, -1.0}, {0.0, 0.0}, {1.0, 1.4}, {1.0, 1.0});
  const auto e = sample_born(psi, 10000, 5);
  CHECK(e.dim == 2);
  CHECK(equivariance_distance(e, psi) < 0.02);
}

TEST_CASE("equivariance through half an SHO period")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  const QuantumModel model = make_quantum_model(g, {1.0, 1.0}, harmonic_potential(1.0));
  const auto psi = make_gaussian(g, 2.0, 0.0, 0.8, 1.0);
  const auto ens = sample_born(psi, 10000, 21);
  AdvanceOptions opt;
  opt.log_cap = 50;
  opt.log_stride = 50;
  const auto run = advance_trajectories(model, psi, ens, pi, 1e-3, opt);
  CHECK(equivariance_distance(run.ensemble, run.psi) < 0.03);
  // The ensemble mean follows <x> = 2 cos t.
  CHECK(std::abs(mean(run.ensemble.positions) - expectation_xp(run.psi).x[0]) < 0.03);
  CHECK(expectation_xp(run.psi).x[0] == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(no_crossing_check(run.log, 0.0).holds);
  CHECK(run.log.ids.size() == 50);
  CHECK(run.log.times.front() == 0.0);
  CHECK(run.log.times.back() == doctest::Approx(pi));
}

TEST_CASE("no-crossing check on synthetic logs")
{
  TrajectoryLog log;
  log.ids = {0, 1, 2};
  log.times = {0.0, 1.0, 2.0};
  log.frames = {{0.0, 1.0, 2.0}, {0.5, 1.0, 1.9}, {1.2, 1.1, 1.8}};
  const auto strict = no_crossing_check(log, 0.0);
  CHECK_FALSE(strict.holds);
  REQUIRE(strict.violation.has_value());
  CHECK(strict.violation->step == 2);
  CHECK(strict.violation->first == 0);
  CHECK(strict.violation->second == 1);
  CHECK(no_crossing_check(log, 0.2).holds);

  // The initial order need not follow the ids.
  TrajectoryLog shuffled;
  shuffled.ids = {0, 1};
  shuffled.times = {0.0, 1.0};
  shuffled.frames = {{3.0, -1.0}, {2.0, 0.0}};
  CHECK(no_crossing_check(shuffled, 0.0).holds);
}

TEST_CASE("epsilon supports split two packets")
{
  const GridSpec g = GridSpec::line(-16.0, 16.0, 256);
  const auto a = make_gaussian(g, -5.0, 0.0, 1.0, 1.0);
  const auto b = make_gaussian(g, 5.0, 0.0, 1.0, 1.0);
  GridWavefunction s = a;
  for (std::size_t j = 0; j < s.psi.size(); ++j) s.psi[j] = (a.psi[j] + b.psi[j]) / std::sqrt(2.0);
  const auto r = epsilon_support(s, 1e-3);
  CHECK(r.n_components == 2);
  CHECK(support_label_at(r, g, {-5.0, 0.0}) != support_label_at(r, g, {5.0, 0.0}));
  CHECK(support_label_at(r, g, {0.0, 0.0}) == -1);
}

TEST_CASE("two packets on a line reflect off each other without crossing")
{
  TwoPacketParams p;
  p.n_trajectories = 100;
  p.n_equivariance = 2000;
  const auto r = two_packet_scenario(false, p);
  CHECK(r.n_in_support > 90);
  CHECK(r.reversed_fraction == 1.0);
  CHECK(r.no_crossing);
  CHECK(r.ks_initial < 0.04);
  CHECK(r.ks_final < 0.04);
  CHECK(r.norm_drift < 1e-8);

  TwoPacketParams overlapping = p;
  overlapping.separation = 2.0;
  CHECK_THROWS_AS(two_packet_scenario(false, overlapping), ConfigError);
}

TEST_CASE("Bohmian Newton law holds along SHO trajectories")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  const QuantumModel model = make_quantum_model(g, {1.0, 1.0}, harmonic_potential(1.0));
  const auto psi = make_gaussian(g, 1.5, 0.0, 0.8, 1.0);
  const auto ens = sample_born(psi, 100, 9);
  const auto r = bohmian_newton_check(model, psi, ens, 2.0, 1e-3, 1e-2);
  CHECK(r.used > 1000);
  CHECK(r.max_relative < 1e-3);
}

TEST_CASE("a trajectory leaving the grid is an error")
{
  const GridSpec g = GridSpec::line(-12.8, 12.8, 256);
  const QuantumModel model = make_quantum_model(g, {1.0, 1.0}, free_potential());
  const auto psi = make_gaussian(g, 6.0, 5.0, 1.0, 1.0);
  const auto ens = sample_born(psi, 50, 1);
  CHECK_THROWS_AS(advance_trajectories(model, psi, ens, 2.0, 1e-3), NumericalError);
}
