#include "support.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/relativity/relativity.hpp"

using namespace reductcheck;
using testing::Gen;

namespace {

double interval(const Event& e, double c) { return c * c * e.t * e.t - e.x * e.x; }

} // namespace

TEST_CASE("Lorentz boosts preserve the interval")
{
  testing::for_all(81, 50, [](Gen& g) {
    const double c = g.uniform(0.5, 3.0);
    const BoostParams b{g.uniform(-0.99, 0.99) * c, c};
    const Event e{g.uniform(-10.0, 10.0), g.uniform(-10.0, 10.0)};
    const Event f = lorentz_boost(e, b);
    CHECK(interval(f, c) == doctest::Approx(interval(e, c)).epsilon(1e-12).scale(100.0));
    // The inverse boost returns the event.
    const Event back = lorentz_boost(f, BoostParams{-b.v, c});
    CHECK(std::abs(back.t - e.t) < 1e-11);
    CHECK(std::abs(back.x - e.x) < 1e-11);
  });
}

TEST_CASE("boost of (1, 0) at v = 0.6c")
{
  const BoostParams b{0.6, 1.0};
  CHECK(b.gamma() == doctest::Approx(1.25));
  const Event e = lorentz_boost({1.0, 0.0}, b);
  CHECK(e.t == doctest::Approx(1.25));
  CHECK(e.x == doctest::Approx(-0.75));
  const Event g = galilean_boost({1.0, 0.0}, 0.6);
  CHECK(g.t == 1.0);
  CHECK(g.x == doctest::Approx(-0.6));
}

TEST_CASE("Lorentz tends to Galilean as c grows")
{
  testing::for_all(82, 10, [](Gen& g) {
    const Event e{g.uniform(0.5, 5.0), g.uniform(-5.0, 5.0)};
    const double v = g.uniform(-1.0, 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double c : {10.0, 100.0, 1000.0}) {
      const Event l = lorentz_boost(e, {v, c});
      const Event gal = galilean_boost(e, v);
      const double d = std::max(std::abs(l.t - gal.t), std::abs(l.x - gal.x));
      CHECK(d < prev);
      // The leading correction is v x / c^2.
      CHECK(d <= 2.0 * (std::abs(v * e.x) + v * v * std::abs(e.t) + std::abs(v * e.x) * v) / (c * c));
      prev = d;
    }
  });
}

TEST_CASE("simultaneity residual against its small-velocity bound")
{
  testing::for_all(83, 50, [](Gen& g) {
    const BoostParams b{g.uniform(-0.1, 0.1), 1.0};
    const double x = g.uniform(-100.0, 100.0);
    const double t = g.uniform(-10.0, 10.0);
    const double r = simultaneity_residual(b, x, t);
    CHECK(r == doctest::Approx(std::abs(b.gamma() * (t - b.v * x) - t)));
    CHECK(r <= (b.gamma() - 1.0) * std::abs(t) + b.gamma() * std::abs(b.v * x) + 1e-12);
  });
}

TEST_CASE("non-uniform convergence: x* grows like 1/v")
{
  const std::vector<double> betas{0.008, 0.004, 0.002, 0.001};
  const auto table = nonuniform_convergence_table(betas, 0.5, 1.0);
  REQUIRE(table.size() == betas.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    CHECK(table[k].v_over_c == betas[k]);
    const double closed = x_star_closed_form(betas[k], 1.0, 0.5, 1.0);
    CHECK(table[k].x_star == doctest::Approx(closed).epsilon(1e-9));
    // Just below x* the residual is under threshold, at x* it reaches it.
    CHECK(simultaneity_residual({betas[k], 1.0}, 0.999 * closed, 1.0) < 0.5);
    CHECK(simultaneity_residual({betas[k], 1.0}, closed, 1.0) == doctest::Approx(0.5).epsilon(1e-9));
  }
  CHECK(table.back().x_star == doctest::Approx(500.0).epsilon(0.02));
  for (std::size_t k = 1; k < table.size(); ++k) {
    CHECK(table[k].x_star / table[k - 1].x_star == doctest::Approx(2.0).epsilon(0.05));
  }
  CHECK_THROWS_AS(nonuniform_convergence_table({0.1}, 1.5, 1.0), DomainError);
  CHECK_THROWS_AS(nonuniform_convergence_table({0.1}, 0.5, 0.0), DomainError);
  CHECK_THROWS_AS(nonuniform_convergence_table({0.0}, 0.5, 1.0), DomainError);
}

TEST_CASE("velocity composition")
{
  const auto r = boost_composition_check(0.5, 0.5, 1.0);
  CHECK(r.relativistic == doctest::Approx(0.8));
  CHECK(r.galilean == doctest::Approx(1.0));
  CHECK(r.discrepancy == doctest::Approx(0.2));
  CHECK(r.galilean_unphysical);
  CHECK_FALSE(boost_composition_check(0.1, 0.2, 1.0).galilean_unphysical);

  testing::for_all(84, 30, [](Gen& g) {
    const double c = g.uniform(0.5, 2.0);
    const double v1 = g.uniform(-0.95, 0.95) * c;
    const double v2 = g.uniform(-0.95, 0.95) * c;
    const double w = composed_boost_velocity(v1, v2, c);
    CHECK(w == doctest::Approx(boost_composition_check(v1, v2, c).relativistic).epsilon(1e-12));
    CHECK(std::abs(w) < c);
    // Two successive boosts act like the single composed boost.
    const Event e{g.uniform(-5.0, 5.0), g.uniform(-5.0, 5.0)};
    const Event twice = lorentz_boost(lorentz_boost(e, {v1, c}), {v2, c});
    const Event once = lorentz_boost(e, {w, c});
    CHECK(std::abs(twice.t - once.t) < 1e-9);
    CHECK(std::abs(twice.x - once.x) < 1e-9);
  });
}

TEST_CASE("domain conditions")
{
  const DomainThresholds th;
  const auto slow = domain_conditions(0.01, 0.02, 1.0, 1.0, 1.0, th);
  CHECK(slow.frame_speed_small);
  CHECK(slow.body_speed_small);
  REQUIRE(slow.simultaneity_small.has_value());
  CHECK(*slow.simultaneity_small);
  // Far enough away the simultaneity condition fails at the same speed.
  const auto far = domain_conditions(0.01, 0.02, 100.0, 1.0, 1.0, th);
  CHECK(far.frame_speed_small);
  CHECK_FALSE(*far.simultaneity_small);
  CHECK_FALSE(domain_conditions(0.01, 0.02, 1.0, 0.0, 1.0, th).simultaneity_small.has_value());
  CHECK_FALSE(domain_conditions(0.5, 0.02, 1.0, 1.0, 1.0, th).frame_speed_small);
  CHECK_FALSE(domain_conditions(0.01, 0.5, 1.0, 1.0, 1.0, th).body_speed_small);
  CHECK_THROWS_AS(domain_conditions(0.01, 0.02, 1.0, 1.0, 0.0, th), DomainError);
}

TEST_CASE("boost parameter validation")
{
  CHECK_THROWS_AS((BoostParams{1.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((BoostParams{0.1, 0.0}.validate()), DomainError);
  CHECK_THROWS_AS(lorentz_boost({0.0, 0.0}, {-2.0, 1.0}), DomainError);
  CHECK_NOTHROW((BoostParams{-0.5, 1.0}.validate()));
}
