#include "builders.hpp"
#include "registry.hpp"

#include "reductcheck/bohmian/bohmian.hpp"
#include "reductcheck/error.hpp"
#include "reductcheck/histories/histories.hpp"
#include "reductcheck/open/density_matrix.hpp"
#include "reductcheck/quantum/models.hpp"
#include "reductcheck/relativity/relativity.hpp"
#include "reductcheck/threads.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numbers>
#include <random>

namespace reductcheck::scenarios {

std::string series_csv(const Series& s);
void write_outputs(RunReport& report, const std::filesystem::path& dir, const json& meta);

namespace detail {

namespace {

constexpr double pi = std::numbers::pi;

std::string label(const std::string& prefix, double v)
{
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%g", prefix.c_str(), v);
  return buf;
}

GridSpec line_from(const Context& c, const std::string& prefix = "grid")
{
  GridSpec g = GridSpec::line(c.num(prefix + "_lo"), c.num(prefix + "_hi"), c.count(prefix + "_points"));
  g.validate();
  return g;
}

/// Largest residual over samples at each grid time.
std::vector<double> envelope(const ReductionReport& r)
{
  std::vector<double> out;
  for (const auto& tr : r.traces) {
    if (out.size() < tr.residuals.size()) out.resize(tr.residuals.size(), 0.0);
    for (std::size_t i = 0; i < tr.residuals.size(); ++i) out[i] = std::max(out[i], tr.residuals[i]);
  }
  return out;
}

json reduction_json(const ReductionReport& r)
{
  return {{"verdict", to_string(r.verdict)},
          {"max_residual", r.max_residual},
          {"tau_max", r.tau_max},
          {"delta", r.delta},
          {"tau", r.tau},
          {"samples", r.traces.size()}};
}

// reduction_sho ------------------------------------------------------------

void run_reduction_sho(Context& c)
{
  const GridSpec g = line_from(c);
  const double m = c.num("mass");
  const double k = m * c.num("omega") * c.num("omega");
  const QuantumModel qm = make_quantum_model(g, {m, m}, harmonic_potential(k));
  const HamiltonianModel hm{{m}, 1, harmonic_potential(k)};
  const auto low = quantum_dynamical_model("sho_quantum", qm, c.num("dt"));
  const auto high = classical_dynamical_model("sho_classical", hm, c.num("classical_dt"));

  const auto x0s = c.list("fixtures_x0");
  const auto p0s = c.list("fixtures_p0");
  if (x0s.size() != p0s.size()) throw ConfigError("fixtures_x0 and fixtures_p0 differ in length");
  const double width = c.num("width");
  const double x_range = c.num("sample_x_range");
  const double p_range = c.num("sample_p_range");
  Sampler sampler = [=](std::uint64_t seed, std::size_t n) {
    std::vector<NormedState> out;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(-x_range, x_range), up(-p_range, p_range);
    for (std::size_t i = 0; i < n; ++i) {
      const double x0 = i < x0s.size() ? x0s[i] : ux(rng);
      const double p0 = i < p0s.size() ? p0s[i] : up(rng);
      out.push_back(to_state(make_gaussian(g, x0, p0, width, m), "sho_quantum"));
    }
    return out;
  };
  const BridgeMap bridge = expectation_bridge("sho_quantum", "sho_classical", g, {m, m}, sampler);

  ReductionSpec spec;
  spec.delta = c.num("delta");
  spec.tau = c.num("tau");
  spec.time_grid = uniform_time_grid(spec.tau, c.num("time_step"));
  spec.n_domain_samples = c.count("n_samples");
  spec.rng_seed = c.seed();
  const ReductionReport r = check_dsr(low, high, bridge, spec);
  c.check("dsr_max_residual", r.max_residual, "<=", spec.delta);
  c.metric("dsr", reduction_json(r));

  const auto first = sampler(spec.rng_seed, 1).front();
  c.metric("differential_residual",
           dsr_differential_residual(low, high, bridge, first, c.num("differential_time"), c.num("fd_step")));

  Series res{"dsr_residual", {"t", "max_residual"}, {}};
  const auto env = envelope(r);
  for (std::size_t i = 0; i < env.size(); ++i) res.rows.push_back({spec.time_grid[i], env[i]});
  c.add_series(std::move(res));

  // Width of the coherent state over whole periods.
  const double omega = c.num("omega");
  const double period = 2.0 * pi / omega;
  const std::size_t per = c.count("width_samples_per_period");
  const std::size_t periods = c.count("width_periods");
  GridWavefunction w = make_gaussian(g, c.num("coherent_x0"), 0.0, 1.0 / std::sqrt(m * omega), m);
  const double w0 = position_stdev(w, 0);
  SchrodingerPropagator prop(qm, c.num("dt"));
  Series ws{"coherent_width", {"t", "position_stdev"}, {{0.0, w0}}};
  double worst = 0.0;
  for (std::size_t s = 1; s <= per * periods; ++s) {
    prop.advance(w, period / static_cast<double>(per));
    const double sd = position_stdev(w, 0);
    worst = std::max(worst, std::abs(sd - w0));
    ws.rows.push_back({period * static_cast<double>(s) / static_cast<double>(per), sd});
  }
  c.add_series(std::move(ws));
  c.check("coherent_width_deviation", worst, "<=", c.num("width_tolerance"));
}

// reduction_quartic --------------------------------------------------------

void run_reduction_quartic(Context& c)
{
  const GridSpec g = line_from(c);
  const double m = c.num("mass");
  const Potential v = quartic_potential(c.num("lambda"));
  const QuantumModel qm = make_quantum_model(g, {m, m}, v);
  const HamiltonianModel hm{{m}, 1, v};
  const auto low = quantum_dynamical_model("quartic_quantum", qm, c.num("dt"));
  const auto high = classical_dynamical_model("quartic_classical", hm, c.num("dt"), 1.0, c.num("p_scale"));

  ReductionSpec spec;
  spec.delta = c.num("delta");
  spec.tau = c.num("tau");
  spec.time_grid = uniform_time_grid(spec.tau, c.num("time_step"));
  spec.n_domain_samples = 1;
  spec.rng_seed = c.seed();

  const auto widths = c.list("widths");
  if (widths.size() < 2) throw ConfigError("widths needs at least two entries");
  std::vector<std::string> cols{"t"};
  std::vector<std::vector<double>> traces;
  std::vector<double> taus;
  json per_width = json::array();
  for (double L : widths) {
    const auto x0 = to_state(make_gaussian(g, c.num("x0"), c.num("p0"), L, m), "quartic_quantum");
    const BridgeMap b = expectation_bridge("quartic_quantum", "quartic_classical", g, {m, m}, fixture_sampler({x0}));
    const ReductionReport r = check_dsr(low, high, b, spec);
    taus.push_back(r.tau_max);
    traces.push_back(r.traces.front().residuals);
    cols.push_back(label("residual_L", L));
    json row = reduction_json(r);
    row["width"] = L;
    per_width.push_back(row);
  }
  c.metric("per_width", per_width);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < taus.size(); ++i) margin = std::min(margin, taus[i] - taus[i + 1]);
  c.check("tau_max_strictly_decreasing_margin", margin, ">", 0.0);

  Series s{"quartic_residual", cols, {}};
  for (std::size_t i = 0; i < spec.time_grid.size(); ++i) {
    std::vector<double> row{spec.time_grid[i]};
    for (const auto& tr : traces) row.push_back(i < tr.size() ? tr[i] : std::nan(""));
    s.rows.push_back(row);
  }
  c.add_series(std::move(s));
}

// superposition_counterexample ----------------------------------------------

/// First time the classical paths from rest at xa < xb meet, or +inf.
double first_crossing(const HamiltonianModel& hm, double xa, double xb, double dt, double horizon)
{
  PhaseState a{Eigen::VectorXd::Constant(1, xa), Eigen::VectorXd::Zero(1)};
  PhaseState b{Eigen::VectorXd::Constant(1, xb), Eigen::VectorXd::Zero(1)};
  for (double t = 0.0; t < horizon; t += dt) {
    const PhaseState na = evolve_classical(hm, a, dt, dt).state;
    const PhaseState nb = evolve_classical(hm, b, dt, dt).state;
    const double g0 = b.q[0] - a.q[0];
    const double g1 = nb.q[0] - na.q[0];
    if (g1 <= 0.0) return t + dt * g0 / (g0 - g1);
    a = na;
    b = nb;
  }
  return std::numeric_limits<double>::infinity();
}

void run_superposition(Context& c)
{
  const GridSpec g = line_from(c);
  const double m = c.num("mass");
  const Potential v = quartic_potential(c.num("lambda"));
  const QuantumModel qm = make_quantum_model(g, {m, m}, v);
  const HamiltonianModel hm{{m}, 1, v};
  const auto low = quantum_dynamical_model("sup_quantum", qm, c.num("dt"));
  const auto high = classical_dynamical_model("sup_classical", hm, c.num("classical_dt"), 1.0, c.num("p_scale"));

  const double xa = c.num("left_x0");
  const double xb = c.num("right_x0");
  if (!(xa < xb)) throw ConfigError("left_x0 must be below right_x0");
  const double t_cross = first_crossing(hm, xa, xb, c.num("classical_dt"), c.num("horizon"));
  if (!std::isfinite(t_cross)) throw ConfigError("the classical paths do not meet within the horizon");
  c.metric("crossing_time", t_cross);

  const double L = c.num("width");
  const GridWavefunction a = make_gaussian(g, xa, 0.0, L, m);
  const GridWavefunction b = make_gaussian(g, xb, 0.0, L, m);
  const GridWavefunction sup = superpose(a, b);
  const std::vector<NormedState> fixtures{to_state(sup, "sup_quantum"), to_state(a, "sup_quantum"),
                                          to_state(b, "sup_quantum")};
  const BridgeMap bridge = expectation_bridge("sup_quantum", "sup_classical", g, {m, m}, fixture_sampler(fixtures));
  const auto times = uniform_time_grid(std::floor(t_cross / c.num("time_step")) * c.num("time_step"), c.num("time_step"));

  const double threshold = c.num("fail_threshold");
  const double component_delta = c.num("component_delta");
  std::vector<SampleTrace> traces;
  for (const auto& f : fixtures) traces.push_back(dsr_trace(low, high, bridge, f, times, component_delta));

  double first_over = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (traces[0].residuals[i] > threshold) {
      first_over = times[i];
      break;
    }
  }
  c.metric("superposition_first_exceedance", std::isfinite(first_over) ? json(first_over) : json(nullptr));
  c.check("superposition_max_residual", traces[0].max_residual, ">", threshold);
  c.check("left_component_max_residual", traces[1].max_residual, "<=", component_delta);
  c.check("right_component_max_residual", traces[2].max_residual, "<=", component_delta);

  Series s{"superposition_residual", {"t", "superposition", "left_component", "right_component"}, {}};
  for (std::size_t i = 0; i < times.size(); ++i) {
    s.rows.push_back({times[i], traces[0].residuals[i], traces[1].residuals[i], traces[2].residuals[i]});
  }
  c.add_series(std::move(s));
}

// symmetry_checks ----------------------------------------------------------

json symmetry_json(const SymmetryResult& r)
{
  return {{"name", r.name},
          {"max_residual", r.max_residual},
          {"tolerance", r.tolerance},
          {"evaluated", r.evaluated},
          {"excluded", r.excluded},
          {"verdict", to_string(r.verdict)}};
}

void run_symmetry(Context& c)
{
  json results = json::array();
  // Free particle on a line: translations and boosts.
  {
    const GridSpec g = line_from(c);
    const double m = c.num("mass");
    const QuantumModel qm = make_quantum_model(g, {m, m}, free_potential());
    const HamiltonianModel hm{{m}, 1, free_potential()};
    auto low = quantum_dynamical_model("free_quantum", qm, c.num("dt"));
    auto high = classical_dynamical_model("free_classical", hm, c.num("dt"));
    const auto x0s = c.list("fixtures_x0");
    const auto p0s = c.list("fixtures_p0");
    if (x0s.size() != p0s.size()) throw ConfigError("fixtures_x0 and fixtures_p0 differ in length");
    std::vector<NormedState> samples;
    for (std::size_t i = 0; i < x0s.size(); ++i) {
      samples.push_back(to_state(make_gaussian(g, x0s[i], p0s[i], c.num("width"), m), "free_quantum"));
    }
    const BridgeMap bridge = expectation_bridge("free_quantum", "free_classical", g, {m, m}, fixture_sampler(samples));

    const double a = c.num("translation");
    const double v = c.num("boost");
    const SymmetryPair tr{classical_translation(Eigen::VectorXd::Constant(1, a)), quantum_translation(g, {m, m}, {a, 0.0})};
    const SymmetryPair bo{classical_boost(Eigen::VectorXd::Constant(1, v), {m}), quantum_boost(g, {m, m}, {v, 0.0})};
    low.symmetries = {tr.low, bo.low};
    high.symmetries = {tr.high, bo.high};
    const double tol = c.num("translation_tolerance");
    const double btol = c.num("boost_tolerance");

    const auto rt = check_symmetry_commutation(low, high, bridge, tr.high, tr.low, samples, tol);
    results.push_back(symmetry_json(rt));
    c.check("translation_commutation", rt.max_residual, "<=", tol);
    double boost_worst = 0.0;
    double group_worst = 0.0;
    for (double t : c.list("boost_times")) {
      const auto rb = check_symmetry_commutation(low, high, bridge, bo.high, bo.low, samples, btol, t);
      json row = symmetry_json(rb);
      row["t"] = t;
      results.push_back(row);
      boost_worst = std::max(boost_worst, rb.verdict == Verdict::inconclusive ? std::nan("") : rb.max_residual);
      const auto rg = check_symmetry_group(low, high, bridge, tr, bo, samples, std::max(tol, btol), t);
      json grow = symmetry_json(rg);
      grow["t"] = t;
      results.push_back(grow);
      group_worst = std::max(group_worst, rg.verdict == Verdict::inconclusive ? std::nan("") : rg.max_residual);
    }
    c.check("boost_commutation", boost_worst, "<=", btol);
    c.check("translation_boost_group", group_worst, "<=", std::max(tol, btol));
  }
  // Isotropic oscillator in a plane: rotations.
  {
    const GridSpec g = GridSpec::plane(c.num("plane_lo"), c.num("plane_hi"), c.count("plane_points"), c.num("plane_lo"),
                                       c.num("plane_hi"), c.count("plane_points"));
    g.validate();
    const double m = c.num("mass");
    const Potential v = harmonic_potential(c.num("plane_k"));
    const QuantumModel qm = make_quantum_model(g, {m, m}, v);
    const HamiltonianModel hm{{m}, 2, v};
    auto low = quantum_dynamical_model("plane_quantum", qm, c.num("plane_dt"));
    auto high = classical_dynamical_model("plane_classical", hm, c.num("plane_dt"));
    const auto xs = c.list("plane_fixtures_x");
    const auto ys = c.list("plane_fixtures_y");
    if (xs.size() != ys.size()) throw ConfigError("plane_fixtures_x and plane_fixtures_y differ in length");
    std::vector<NormedState> samples;
    const double w = c.num("plane_width");
    for (std::size_t i = 0; i < xs.size(); ++i) {
      samples.push_back(to_state(make_gaussian_2d(g, {xs[i], ys[i]}, {0.2, -0.1}, {w, w}, {m, m}), "plane_quantum"));
    }
    const BridgeMap bridge = expectation_bridge("plane_quantum", "plane_classical", g, {m, m}, fixture_sampler(samples));
    const double rtol = c.num("rotation_tolerance");
    auto interp = std::make_shared<double>(0.0);
    double worst = 0.0;
    for (double theta : c.list("rotation_angles")) {
      const SymmetryTransform rh = classical_rotation(theta);
      const SymmetryTransform rl = quantum_rotation(g, {m, m}, theta, interp);
      low.symmetries = {rl};
      high.symmetries = {rh};
      const auto rr = check_symmetry_commutation(low, high, bridge, rh, rl, samples, rtol);
      json row = symmetry_json(rr);
      row["theta"] = theta;
      results.push_back(row);
      worst = std::max(worst, rr.verdict == Verdict::inconclusive ? std::nan("") : rr.max_residual);
    }
    c.metric("rotation_interpolation_error", *interp);
    c.check("rotation_commutation", worst, "<=", rtol);
  }
  c.metric("results", results);
}

// transitivity_chain -------------------------------------------------------

void run_transitivity(Context& c)
{
  const GridSpec g = GridSpec::plane(c.num("plane_lo"), c.num("plane_hi"), c.count("plane_points"), c.num("plane_lo"),
                                     c.num("plane_hi"), c.count("plane_points"));
  g.validate();
  const double m1 = c.num("mass_1");
  const double m2 = c.num("mass_2");
  const Potential v = pair_harmonic_potential(c.num("pair_k"));
  const QuantumModel qm = make_quantum_model(g, {m1, m2}, v);
  const HamiltonianModel two{{m1, m2}, 1, v};
  const HamiltonianModel com{{m1 + m2}, 1, free_potential()};
  const double dt = c.num("dt");
  const auto m3_model = quantum_dynamical_model("pair_quantum", qm, dt);
  const auto m2_model = classical_dynamical_model("pair_classical", two, dt);
  const auto m1_model = classical_dynamical_model("centre_of_mass", com, dt);

  const double w = c.num("width");
  const double spread = c.num("sample_spread");
  const std::array<double, 2> q0{c.num("q1"), c.num("q2")};
  const std::array<double, 2> p0{c.num("p1"), c.num("p2")};
  Sampler quantum_sampler = [=](std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<NormedState> out;
    for (std::size_t i = 0; i < n; ++i) {
      const std::array<double, 2> q = i == 0 ? q0 : std::array<double, 2>{q0[0] + u(rng), q0[1] + u(rng)};
      const std::array<double, 2> p = i == 0 ? p0 : std::array<double, 2>{p0[0] + u(rng), p0[1] + u(rng)};
      out.push_back(to_state(make_gaussian_2d(g, q, p, {w, w}, {m1, m2}), "pair_quantum"));
    }
    return out;
  };
  Sampler classical_sampler = [=](std::uint64_t seed, std::size_t n) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> u(-spread, spread);
    std::vector<NormedState> out;
    for (std::size_t i = 0; i < n; ++i) {
      PhaseState s{Eigen::Vector2d(q0[0] + u(rng), q0[1] + u(rng)), Eigen::Vector2d(p0[0] + u(rng), p0[1] + u(rng))};
      out.push_back(to_state(s, "pair_classical"));
    }
    return out;
  };
  const BridgeMap b32 = expectation_bridge("pair_quantum", "pair_classical", g, {m1, m2}, quantum_sampler);
  const BridgeMap b21 = center_of_mass_bridge("pair_classical", "centre_of_mass", {m1, m2}, classical_sampler);

  const double d21 = c.num("delta_21");
  const double d32 = c.num("delta_32");
  ReductionSpec spec;
  spec.tau = c.num("tau");
  spec.delta = d21 + d32;
  spec.time_grid = uniform_time_grid(spec.tau, c.num("time_step"));
  spec.n_domain_samples = c.count("n_samples");
  spec.rng_seed = c.seed();
  const TransitivityReport r = check_transitivity(m1_model, m2_model, m3_model, b21, b32, spec, d21, d32);

  const double bound = d21 + r.lipschitz_k * d32;
  c.metric("lipschitz_k", r.lipschitz_k);
  c.metric("tau_composed", r.tau_composed);
  c.metric("composed_delta", bound);
  c.metric("r21", reduction_json(r.r21));
  c.metric("r32", reduction_json(r.r32));
  c.metric("r31", reduction_json(r.r31));
  c.check("component_21_max_residual", r.r21.max_residual, "<=", d21);
  c.check("component_32_max_residual", r.r32.max_residual, "<=", d32);
  c.check("composed_residual", r.composed_residual, "<", bound);
  c.check("tau_composed", r.tau_composed, ">=", std::min(r.r21.tau_max, r.r32.tau_max));

  Series s{"transitivity_residual", {"t", "r21", "r32", "r31"}, {}};
  const auto e21 = envelope(r.r21);
  const auto e32 = envelope(r.r32);
  const auto e31 = envelope(r.r31);
  for (std::size_t i = 0; i < spec.time_grid.size(); ++i) {
    auto at = [&](const std::vector<double>& e) { return i < e.size() ? e[i] : std::nan(""); };
    s.rows.push_back({spec.time_grid[i], at(e21), at(e32), at(e31)});
  }
  c.add_series(std::move(s));
}

// pure_decoherence ---------------------------------------------------------

void run_pure_decoherence(Context& c)
{
  const GridSpec g = line_from(c);
  const GridWavefunction cat =
      superpose(make_gaussian(g, -c.num("separation") / 2, 0.0, c.num("width"), 1.0),
                make_gaussian(g, c.num("separation") / 2, 0.0, c.num("width"), 1.0));
  const DensityMatrixGrid rho0 = density_from_wavefunction(cat);
  const double t_end = c.num("t_end");
  const double dt = c.num("dt");
  const std::size_t n_out = c.count("n_outputs");
  const auto lambdas = c.list("lambdas");

  // Off-diagonal element used for the fitted rate.
  const Eigen::Index i1 = static_cast<Eigen::Index>(g.n[0] / 2 - c.count("probe_offset"));
  const Eigen::Index i2 = static_cast<Eigen::Index>(g.n[0] / 2 + c.count("probe_offset"));
  const double d2 = std::pow(g.x(0, static_cast<std::size_t>(i1)) - g.x(0, static_cast<std::size_t>(i2)), 2);

  double worst = 0.0;
  json per_lambda = json::array();
  std::vector<std::string> cols{"t"};
  std::vector<std::vector<double>> coherence(n_out + 1);
  for (std::size_t s = 0; s <= n_out; ++s) coherence[s].push_back(t_end * static_cast<double>(s) / static_cast<double>(n_out));
  for (double lam : lambdas) {
    const OpenModel model = make_open_model(g, std::numeric_limits<double>::infinity(), free_potential(), lam);
    DensityMatrixGrid rho = rho0;
    double err = 0.0;
    std::vector<double> ts{0.0}, probe{std::abs(rho0.rho(i1, i2))};
    coherence[0].push_back(widths(rho0).coherence_length);
    for (std::size_t s = 1; s <= n_out; ++s) {
      const double t = t_end * static_cast<double>(s) / static_cast<double>(n_out);
      rho = evolve_pure_decoherence(model, rho, t_end / static_cast<double>(n_out), dt).state;
      for (Eigen::Index i = 0; i < rho.rho.rows(); ++i) {
        for (Eigen::Index j = 0; j < rho.rho.cols(); ++j) {
          const double u = model.x[static_cast<std::size_t>(i)] - model.x[static_cast<std::size_t>(j)];
          err = std::max(err, std::abs(rho.rho(i, j) - rho0.rho(i, j) * std::exp(-lam * u * u * t)));
        }
      }
      ts.push_back(t);
      probe.push_back(std::abs(rho.rho(i1, i2)));
      coherence[s].push_back(widths(rho).coherence_length);
    }
    worst = std::max(worst, err);
    cols.push_back(label("coherence_length_lambda", lam));
    per_lambda.push_back({{"lambda", lam},
                          {"max_abs_error", err},
                          {"fitted_lambda", fit_decay_rate(ts, probe) / d2},
                          {"final_purity", purity(rho)}});
  }
  c.metric("per_lambda", per_lambda);
  c.check("analytic_law_max_error", worst, "<=", c.num("tolerance"));
  c.add_series({"coherence_length", cols, coherence});
}

// open_ehrenfest -----------------------------------------------------------

void run_open_ehrenfest(Context& c)
{
  const GridSpec g = line_from(c);
  const double m = c.num("mass");
  const std::vector<double> pot_params{c.num("potential_k")};
  const Potential v = potential_by_name(c.str("potential"), pot_params);
  const DensityMatrixGrid rho =
      density_from_wavefunction(make_gaussian(g, c.num("x0"), c.num("p0"), c.num("width"), m));

  double lo = std::numeric_limits<double>::infinity(), hi = -lo, trace_worst = 0.0;
  json rows = json::array();
  for (double lam : c.list("lambdas")) {
    const OpenModel model = make_open_model(g, m, v, lam);
    const OpenEhrenfest r = open_ehrenfest_residual(model, MasterEquation::pure_decoherence, rho, c.num("step"));
    lo = std::min(lo, r.newton);
    hi = std::max(hi, r.newton);
    trace_worst = std::max(trace_worst, r.trace_identity);
    rows.push_back({{"lambda", lam}, {"newton", r.newton}, {"trace_identity", r.trace_identity}, {"strong", r.strong}});
  }
  c.metric("per_lambda", rows);
  c.check("newton_residual_spread", hi - lo, "<=", c.num("spread_tolerance"));
  c.check("trace_identity_residual", trace_worst, "<=", c.num("trace_tolerance"));
}

// histories ----------------------------------------------------------------

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

double probability_sum_error(const HistorySpec& spec)
{
  double sum = 0.0;
  for (const auto& idx : enumerate_histories(spec)) sum += history_probability(spec, idx);
  return std::abs(sum - 1.0);
}

double max_off_diagonal(const Eigen::MatrixXcd& d)
{
  double out = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      if (i != j) out = std::max(out, std::abs(d(i, j)));
    }
  }
  return out;
}

/// Cells by the first-slice outcome.
std::vector<std::size_t> first_slice_cells(const HistorySpec& spec)
{
  std::vector<std::size_t> cells;
  for (const auto& idx : enumerate_histories(spec)) cells.push_back(static_cast<std::size_t>(idx.front()));
  return cells;
}

void run_histories_trivial(Context& c)
{
  const int n = static_cast<int>(c.count("n_slices"));
  const HistorySpec spec = trivial_sigma_z(n);
  spec.validate();
  const auto v = validate_family(spec.family(0));
  c.check("family_is_pvm", v.pvm ? 1.0 : 0.0, "==", 1.0);
  c.check("probability_sum_error", probability_sum_error(spec), "<=", c.num("sum_tolerance"));
  const Eigen::MatrixXcd d = decoherence_matrix(spec);
  c.check("max_off_diagonal", max_off_diagonal(d), "<=", c.num("exact_tolerance"));

  const HistoryIndex all_up(static_cast<std::size_t>(n), 0), all_down(static_cast<std::size_t>(n), 1);
  c.check("pr_all_up_error", std::abs(history_probability(spec, all_up) - 0.5), "<=", c.num("exact_tolerance"));
  c.check("pr_all_down_error", std::abs(history_probability(spec, all_down) - 0.5), "<=", c.num("exact_tolerance"));

  double defect = 0.0;
  for (const auto& cell : coarse_grain(spec, first_slice_cells(spec))) defect = std::max(defect, cell.defect);
  c.check("coarse_grain_defect", defect, "<=", c.num("exact_tolerance"));

  Series probs{"history_probabilities", {"history", "probability"}, {}};
  const auto all = enumerate_histories(spec);
  for (std::size_t k = 0; k < all.size(); ++k) probs.rows.push_back({static_cast<double>(k), d(k, k).real()});
  c.add_series(std::move(probs));

  // Medium decoherence without configuration-space decoherence.
  const HistorySpec w = plus_minus_witness();
  const std::complex<double> dpm = decoherence_functional(w, {0}, {1});
  const double dx_norm = config_decoherence_functional(w, {0}, {1}, true);
  const double dx_raw = config_decoherence_functional(w, {0}, {1}, false);
  c.metric("witness", {{"D_plus_minus", complex_json(dpm)}, {"D_X_normalized", dx_norm}, {"D_X_raw", dx_raw}});
  c.check("witness_D", std::abs(dpm), "<=", c.num("exact_tolerance"));
  c.check("witness_D_X_normalized_error", std::abs(dx_norm - 0.5), "<=", c.num("exact_tolerance"));
}

void run_histories_branching(Context& c)
{
  const int n = static_cast<int>(c.count("n_slices"));
  const HistorySpec sx = sigma_x_precession(c.num("omega"), c.num("dt"), n);
  sx.validate();
  c.check("sigma_x_probability_sum_error", probability_sum_error(sx), "<=", c.num("sum_tolerance"));
  const Eigen::MatrixXcd d = decoherence_matrix(sx);
  c.metric("sigma_x_max_off_diagonal", max_off_diagonal(d));

  double slack = std::numeric_limits<double>::infinity();
  json cells = json::array();
  for (const auto& cell : coarse_grain(sx, first_slice_cells(sx))) {
    slack = std::min(slack, cell.cross_bound - cell.defect);
    cells.push_back({{"probability", cell.probability},
                     {"fine_sum", cell.fine_sum},
                     {"defect", cell.defect},
                     {"cross_bound", cell.cross_bound}});
  }
  c.metric("sigma_x_coarse_cells", cells);
  c.check("coarse_grain_defect_within_bound", slack, ">=", -c.num("sum_tolerance"));

  const BranchingResult bx = check_branching(sx);
  json bxj = {{"holds", bx.holds}};
  if (bx.witness) {
    bxj["early_slice"] = bx.witness->early_slice;
    bxj["late_slice"] = bx.witness->late_slice;
    bxj["early_a"] = bx.witness->early_a;
    bxj["early_b"] = bx.witness->early_b;
    bxj["late"] = bx.witness->late;
  }
  c.metric("sigma_x_branching", bxj);

  const HistorySpec rec = record_keeping(c.num("record_theta"), n);
  rec.validate();
  c.check("record_probability_sum_error", probability_sum_error(rec), "<=", c.num("sum_tolerance"));
  c.metric("record_max_off_diagonal", max_off_diagonal(decoherence_matrix(rec)));
  c.check("record_branching_holds", check_branching(rec).holds ? 1.0 : 0.0, "==", 1.0);

  Series s{"sigma_x_decoherence", {"i", "j", "re", "im"}, {}};
  for (Eigen::Index i = 0; i < d.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.cols(); ++j) {
      s.rows.push_back({static_cast<double>(i), static_cast<double>(j), d(i, j).real(), d(i, j).imag()});
    }
  }
  c.add_series(std::move(s));
}

// bohmian_two_packet -------------------------------------------------------

TwoPacketParams two_packet_params(const Context& c)
{
  TwoPacketParams p;
  p.grid = line_from(c);
  p.mass = c.num("mass");
  p.p = c.num("momentum");
  p.separation = c.num("separation");
  p.width = c.num("width");
  p.dt = c.num("dt");
  p.t_end = c.num("t_end");
  p.n_trajectories = c.count("n_trajectories");
  p.n_equivariance = c.count("n_equivariance");
  p.seed = c.seed();
  p.support_eps = c.num("support_eps");
  p.env_lo = c.num("env_lo");
  p.env_hi = c.num("env_hi");
  p.env_points = c.count("env_points");
  p.env_mass = c.num("env_mass");
  p.env_width = c.num("env_width");
  p.env_separation_widths = c.num("env_separation_widths");
  return p;
}

json two_packet_json(const TwoPacketReport& r)
{
  return {{"with_environment", r.with_environment},
          {"n_trajectories", r.n_trajectories},
          {"n_in_support", r.n_in_support},
          {"reversed_fraction", r.reversed_fraction},
          {"pass_through_fraction", r.pass_through_fraction},
          {"no_crossing", r.no_crossing},
          {"ks_initial", r.ks_initial},
          {"ks_final", r.ks_final},
          {"env_migrations", r.env_migrations},
          {"near_node", r.near_node},
          {"norm_drift", r.norm_drift}};
}

Series trajectory_series(const std::string& name, const TrajectoryLog& log, std::size_t stride)
{
  Series s{name, {"t"}, {}};
  for (std::size_t k = 0; k < log.ids.size(); ++k) {
    s.columns.push_back("x_" + std::to_string(log.ids[k]));
    if (log.dim == 2) s.columns.push_back("y_" + std::to_string(log.ids[k]));
  }
  for (std::size_t f = 0; f < log.frames.size(); f += std::max<std::size_t>(stride, 1)) {
    std::vector<double> row{log.times[f]};
    row.insert(row.end(), log.frames[f].begin(), log.frames[f].end());
    s.rows.push_back(std::move(row));
  }
  return s;
}

void run_bohmian(Context& c)
{
  const std::string mode = c.str("environment");
  if (mode != "both" && mode != "none" && mode != "disjoint" && mode != "identical") {
    throw ConfigError("environment must be one of both, none, disjoint, identical");
  }
  const TwoPacketParams base = two_packet_params(c);
  const double ks_tol = c.num("ks_tolerance");
  const std::size_t stride = c.count("series_stride");

  if (mode == "both" || mode == "none") {
    const TwoPacketReport r = two_packet_scenario(false, base);
    c.metric("no_environment", two_packet_json(r));
    c.check("reversal_fraction", r.reversed_fraction, "==", 1.0);
    c.check("no_crossing_1d", r.no_crossing ? 1.0 : 0.0, "==", 1.0);
    c.check("ks_final_no_environment", r.ks_final, "<=", ks_tol);
    c.add_series(trajectory_series("trajectories_no_environment", r.log, stride));
  }
  if (mode == "both" || mode == "disjoint") {
    const TwoPacketReport r = two_packet_scenario(true, base);
    c.metric("disjoint_environment", two_packet_json(r));
    c.check("pass_through_fraction", r.pass_through_fraction, ">=", c.num("pass_through_min"));
    c.check("ks_final_environment", r.ks_final, "<=", ks_tol);
    c.add_series(trajectory_series("trajectories_environment", r.log, stride));
  }
  if (mode == "identical") {
    TwoPacketParams p = base;
    p.identical_environment = true;
    const TwoPacketReport r = two_packet_scenario(true, p);
    c.metric("identical_environment", two_packet_json(r));
    c.check("reversal_fraction_identical_environment", r.reversed_fraction, "==", 1.0);
  }

  // Newton's law with the quantum potential, on the collision and in a trap.
  const double tol = c.num("newton_tolerance");
  const std::size_t n_newton = c.count("newton_trajectories");
  {
    const GridSpec& g = base.grid;
    const GridWavefunction psi = superpose(make_gaussian(g, -base.separation / 2, base.p, base.width, base.mass),
                                           make_gaussian(g, base.separation / 2, -base.p, base.width, base.mass));
    const QuantumModel free = make_quantum_model(g, {base.mass, base.mass}, free_potential());
    const auto ens = sample_born(psi, n_newton, c.seed());
    const NewtonLawCheck r = bohmian_newton_check(free, psi, ens, c.num("newton_t"), c.num("newton_dt"),
                                                  c.num("newton_floor"), c.num("newton_density_floor"));
    c.metric("newton_collision", {{"max_relative", r.max_relative}, {"used", r.used}, {"skipped", r.skipped}});
    c.check("newton_collision_residual", r.max_relative, "<", tol);
  }
  {
    const GridSpec g = line_from(c, "trap_grid");
    const QuantumModel trap = make_quantum_model(g, {base.mass, base.mass}, harmonic_potential(c.num("trap_k")));
    const GridWavefunction psi = make_gaussian(g, c.num("trap_x0"), 0.0, c.num("trap_width"), base.mass);
    const auto ens = sample_born(psi, n_newton, c.seed());
    const double period = 2.0 * pi * std::sqrt(base.mass / c.num("trap_k"));
    const NewtonLawCheck r = bohmian_newton_check(trap, psi, ens, 0.5 * period, c.num("trap_dt"),
                                                  c.num("newton_floor"), c.num("newton_density_floor"));
    c.metric("newton_trap", {{"max_relative", r.max_relative}, {"used", r.used}, {"skipped", r.skipped}});
    c.check("newton_trap_residual", r.max_relative, "<", tol);

    BohmianEnsemble big = sample_born(psi, c.count("n_equivariance"), c.seed());
    const double ks0 = equivariance_distance(big, psi);
    const BohmianRun run = advance_trajectories(trap, psi, big, period, c.num("trap_dt"));
    const double ks1 = equivariance_distance(run.ensemble, run.psi);
    c.metric("trap_equivariance", {{"ks_initial", ks0}, {"ks_final", ks1}});
    c.check("ks_final_trap", ks1, "<=", ks_tol);
  }
}

// relativity_contraction ---------------------------------------------------

void run_relativity(Context& c)
{
  const double cc = c.num("c");
  const double t = c.num("t");
  const auto vs = c.list("v_over_c");
  const double threshold = c.num("threshold");
  const auto table = nonuniform_convergence_table(vs, threshold, t, cc);
  Series s{"nonuniform_convergence", {"v_over_c", "x_star", "x_star_closed_form"}, {}};
  double worst = 0.0;
  json ratios = json::array();
  for (std::size_t i = 0; i < table.size(); ++i) {
    s.rows.push_back({table[i].v_over_c, table[i].x_star, x_star_closed_form(table[i].v_over_c * cc, cc, threshold, t)});
    if (i == 0) continue;
    const double dv = table[i - 1].v_over_c / table[i].v_over_c;
    const double dx = table[i].x_star / table[i - 1].x_star;
    const double ratio = dx / dv;
    ratios.push_back(ratio);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  c.add_series(std::move(s));
  c.metric("x_star_scaling_ratios", ratios);
  c.check("x_star_inverse_scaling_error", worst, "<=", c.num("scaling_tolerance"));

  // Interval invariance on seeded random events.
  std::mt19937_64 rng(c.seed());
  std::uniform_real_distribution<double> ue(-c.num("event_range"), c.num("event_range"));
  std::uniform_real_distribution<double> uv(-c.num("max_speed"), c.num("max_speed"));
  double interval = 0.0;
  for (std::size_t k = 0; k < c.count("n_events"); ++k) {
    const Event e{ue(rng), ue(rng)};
    const BoostParams b{uv(rng) * cc, cc};
    const Event p = lorentz_boost(e, b);
    const double s0 = cc * cc * e.t * e.t - e.x * e.x;
    const double s1 = cc * cc * p.t * p.t - p.x * p.x;
    interval = std::max(interval, std::abs(s1 - s0));
  }
  c.check("interval_invariance", interval, "<=", c.num("interval_tolerance"));

  const auto comp = boost_composition_check(c.num("compose_v1") * cc, c.num("compose_v2") * cc, cc);
  c.metric("composition", {{"relativistic", comp.relativistic},
                           {"galilean", comp.galilean},
                           {"discrepancy", comp.discrepancy},
                           {"galilean_unphysical", comp.galilean_unphysical},
                           {"matrix_product", composed_boost_velocity(c.num("compose_v1") * cc, c.num("compose_v2") * cc, cc)}});
  c.check("composed_velocity_error", std::abs(comp.relativistic - c.num("expected_relativistic") * cc), "<=",
          c.num("interval_tolerance"));
  c.check("galilean_velocity_error", std::abs(comp.galilean - c.num("expected_galilean") * cc), "<=",
          c.num("interval_tolerance"));
}

// spreading_persistence ----------------------------------------------------

void run_spreading(Context& c)
{
  const GridSpec g = line_from(c);
  const double m = c.num("mass");
  const double a0 = c.num("a0");
  // Full width a = 2 sigma, and sigma = L / sqrt2 for exp(-x^2 / 2L^2).
  GridWavefunction psi = make_gaussian(g, 0.0, 0.0, a0 / std::sqrt(2.0), m);
  const QuantumModel qm = make_quantum_model(g, {m, m}, free_potential());
  SchrodingerPropagator prop(qm, c.num("dt"));
  auto times = c.list("times");
  std::sort(times.begin(), times.end());
  double now = 0.0, worst = 0.0;
  Series s{"spreading", {"t", "simulated_width", "formula_width"}, {{0.0, 2.0 * position_stdev(psi, 0), a0}}};
  for (double t : times) {
    prop.advance(psi, t - now);
    now = t;
    const double sim = 2.0 * position_stdev(psi, 0);
    const double formula = free_spreading_width(a0, m, t);
    worst = std::max(worst, std::abs(sim - formula) / formula);
    s.rows.push_back({t, sim, formula});
  }
  c.add_series(std::move(s));
  c.check("width_relative_error", worst, "<=", c.num("width_tolerance"));

  const Persistence p = persistence_estimate(c.num("si_a0"), c.num("si_a_max"), c.num("si_mass"), c.num("si_speed"),
                                             c.num("si_hbar"));
  c.metric("si_persistence", {{"t_spread_s", p.t_spread}, {"distance_m", p.distance}});
  c.check("si_time_order_of_magnitude", std::abs(std::log10(p.t_spread / c.num("si_expected_time"))), "<=", 0.5);
  c.check("si_distance_order_of_magnitude", std::abs(std::log10(p.distance / c.num("si_expected_distance"))), "<=",
          0.5);
}

// defaults -----------------------------------------------------------------

json sho_defaults()
{
  return {{"grid_lo", -12.8},
          {"grid_hi", 12.8},
          {"grid_points", 128},
          {"mass", 1.0},
          {"omega", 1.0},
          {"width", 1.0 / std::sqrt(2.0)},
          {"fixtures_x0", {1.0, -1.5, 0.5, 2.0, 0.0, -0.7}},
          {"fixtures_p0", {0.3, -0.45, 0.15, 0.6, 0.0, -0.21}},
          {"n_samples", 6},
          {"sample_x_range", 2.0},
          {"sample_p_range", 0.6},
          {"dt", 1e-3},
          {"classical_dt", 1e-3},
          {"delta", 1e-4},
          {"tau", 20.0 * pi},
          {"time_step", pi / 20.0},
          {"differential_time", 1.0},
          {"fd_step", 1e-4},
          {"coherent_x0", 1.0},
          {"width_periods", 10},
          {"width_samples_per_period", 20},
          {"width_tolerance", 1e-6},
          {"seed", 1U}};
}

json quartic_defaults()
{
  return {{"grid_lo", -4.0},
          {"grid_hi", 4.0},
          {"grid_points", 1024},
          {"mass", 1e4},
          {"lambda", 1.0},
          {"x0", 1.0},
          {"p0", 0.0},
          {"widths", {0.1, 0.2, 0.4}},
          {"dt", 0.02},
          {"p_scale", 100.0},
          {"delta", 0.05},
          {"tau", 500.0},
          {"time_step", 1.0},
          {"seed", 1U}};
}

json superposition_defaults()
{
  return {{"grid_lo", -4.0},
          {"grid_hi", 4.0},
          {"grid_points", 2048},
          {"mass", 1e4},
          {"lambda", 1.0},
          {"left_x0", -2.0},
          {"right_x0", 1.0},
          {"width", 0.1},
          {"dt", 0.01},
          {"classical_dt", 0.01},
          {"p_scale", 100.0},
          {"time_step", 1.0},
          {"horizon", 1000.0},
          {"fail_threshold", 0.5},
          {"component_delta", 0.05},
          {"seed", 1U}};
}

json symmetry_defaults()
{
  return {{"grid_lo", -12.8},
          {"grid_hi", 12.8},
          {"grid_points", 128},
          {"mass", 1.0},
          {"width", 1.0},
          {"dt", 1e-3},
          {"fixtures_x0", {-1.0, 0.5, 1.5}},
          {"fixtures_p0", {0.2, -0.4, 0.0}},
          {"translation", 0.5},
          {"boost", 0.3},
          {"boost_times", {0.0, 1.0}},
          {"translation_tolerance", 1e-6},
          {"boost_tolerance", 1e-6},
          {"plane_lo", -8.0},
          {"plane_hi", 8.0},
          {"plane_points", 128},
          {"plane_k", 1.0},
          {"plane_dt", 2.5e-4},
          {"plane_width", 1.0},
          {"plane_fixtures_x", {1.0, -0.5}},
          {"plane_fixtures_y", {0.5, 1.0}},
          {"rotation_angles", {0.3, 0.7854, 2.0}},
          {"rotation_tolerance", 1e-3},
          {"seed", 1U}};
}

json transitivity_defaults()
{
  return {{"plane_lo", -12.0},
          {"plane_hi", 12.0},
          {"plane_points", 128},
          {"mass_1", 1.0},
          {"mass_2", 2.0},
          {"pair_k", 1.0},
          {"q1", -1.0},
          {"q2", 1.0},
          {"p1", 0.3},
          {"p2", -0.1},
          {"width", 1.0},
          {"sample_spread", 0.3},
          {"n_samples", 3},
          {"dt", 0.002},
          {"tau", 4.0},
          {"time_step", 0.25},
          {"delta_21", 1e-8},
          {"delta_32", 1e-4},
          {"seed", 1U}};
}

json pure_decoherence_defaults()
{
  return {{"grid_lo", -8.0},
          {"grid_hi", 8.0},
          {"grid_points", 128},
          {"separation", 4.0},
          {"width", 0.7},
          {"lambdas", {0.5, 1.0, 2.0}},
          {"t_end", 1.0},
          {"dt", 0.01},
          {"n_outputs", 20},
          {"probe_offset", 2},
          {"tolerance", 1e-8},
          {"seed", 1U}};
}

json open_ehrenfest_defaults()
{
  return {{"grid_lo", -10.0},
          {"grid_hi", 10.0},
          {"grid_points", 128},
          {"mass", 1.0},
          {"potential", "harmonic"},
          {"potential_k", 1.0},
          {"x0", 1.0},
          {"p0", 0.5},
          {"width", 0.7},
          {"lambdas", {0.0, 1.0, 10.0}},
          {"step", 1e-4},
          {"spread_tolerance", 1e-6},
          {"trace_tolerance", 1e-6},
          {"seed", 1U}};
}

json histories_trivial_defaults()
{
  return {{"n_slices", 3}, {"sum_tolerance", 1e-10}, {"exact_tolerance", 1e-12}, {"seed", 1U}};
}

json histories_branching_defaults()
{
  return {{"n_slices", 3},
          {"omega", 1.0},
          {"dt", 0.4},
          {"record_theta", pi / 5.0},
          {"sum_tolerance", 1e-10},
          {"seed", 1U}};
}

json bohmian_defaults()
{
  return {{"environment", "both"},
          {"grid_lo", -32.0},
          {"grid_hi", 32.0},
          {"grid_points", 256},
          {"mass", 1.0},
          {"momentum", 3.0},
          {"separation", 8.0},
          {"width", 1.0},
          {"dt", 2.5e-3},
          {"t_end", 4.0},
          {"n_trajectories", 200},
          {"n_equivariance", 10000},
          {"support_eps", 1e-3},
          {"env_lo", -16.0},
          {"env_hi", 16.0},
          {"env_points", 128},
          {"env_mass", 100.0},
          {"env_width", 1.0},
          {"env_separation_widths", 10.0},
          {"pass_through_min", 0.99},
          {"ks_tolerance", 0.03},
          {"newton_trajectories", 200},
          {"newton_t", 8.0 / 3.0},
          {"newton_dt", 2.5e-4},
          {"newton_floor", 1e-2},
          {"newton_density_floor", 1e-2},
          {"newton_tolerance", 0.05},
          {"trap_grid_lo", -12.8},
          {"trap_grid_hi", 12.8},
          {"trap_grid_points", 128},
          {"trap_k", 1.0},
          {"trap_x0", 1.5},
          {"trap_width", 0.8},
          {"trap_dt", 1e-3},
          {"series_stride", 10},
          {"seed", 7U}};
}

json relativity_defaults()
{
  return {{"c", 1.0},
          {"t", 1.0},
          {"v_over_c", {0.008, 0.004, 0.002, 0.001}},
          {"threshold", 0.5},
          {"scaling_tolerance", 0.05},
          {"n_events", 1000},
          {"event_range", 10.0},
          {"max_speed", 0.99},
          {"interval_tolerance", 1e-10},
          {"compose_v1", 0.5},
          {"compose_v2", 0.5},
          {"expected_relativistic", 0.8},
          {"expected_galilean", 1.0},
          {"seed", 1U}};
}

json spreading_defaults()
{
  return {{"grid_lo", -25.6},
          {"grid_hi", 25.6},
          {"grid_points", 512},
          {"mass", 1.0},
          {"a0", 1.0},
          {"dt", 1e-3},
          {"times", {0.5, 1.0, 2.0}},
          {"width_tolerance", 1e-3},
          {"si_a0", 1e-5},
          {"si_a_max", 1e-3},
          {"si_mass", 1e-31},
          {"si_speed", 1e6},
          {"si_hbar", 1e-34},
          {"si_expected_time", 1e-5},
          {"si_expected_distance", 10.0},
          {"seed", 1U}};
}

} // namespace

void Context::check(const std::string& name, double value, const std::string& relation, double bound)
{
  bool ok = false;
  if (relation == "<=") ok = value <= bound;
  else if (relation == "<") ok = value < bound;
  else if (relation == ">=") ok = value >= bound;
  else if (relation == ">") ok = value > bound;
  else if (relation == "==") ok = value == bound;
  else throw ConfigError("unknown relation " + relation);
  report_.checks.push_back({name, value, bound, relation, ok});
}

const std::vector<ScenarioDef>& registry()
{
  static const std::vector<ScenarioDef> defs = {
      {"reduction_sho", "harmonic oscillator: quantum packets reduce to classical phase space; coherent width",
       sho_defaults(), {"delta", "tau"}, run_reduction_sho},
      {"reduction_quartic", "quartic well: tau_max of the quantum-classical reduction against packet width",
       quartic_defaults(), {"delta", "tau"}, run_reduction_quartic},
      {"superposition_counterexample", "two-packet superposition fails the reduction while each packet passes",
       superposition_defaults(), {}, run_superposition},
      {"symmetry_checks", "translation, boost and rotation commute with the expectation bridge",
       symmetry_defaults(), {}, run_symmetry},
      {"transitivity_chain", "centre of mass <- two-body classical <- two-body quantum composed reduction",
       transitivity_defaults(), {"delta_21", "delta_32", "tau"}, run_transitivity},
      {"pure_decoherence", "H=0 pure decoherence against the analytic Gaussian damping law",
       pure_decoherence_defaults(), {}, run_pure_decoherence},
      {"open_ehrenfest", "open-system Ehrenfest residuals across decoherence strengths", open_ehrenfest_defaults(), {},
       run_open_ehrenfest},
      {"histories_trivial", "H=0 sigma_z histories and the configuration-space witness", histories_trivial_defaults(),
       {}, run_histories_trivial},
      {"histories_branching", "sigma_x histories, coarse graining and the branching condition",
       histories_branching_defaults(), {}, run_histories_branching},
      {"bohmian_two_packet", "Bohmian two-packet collision with and without an environment coordinate",
       bohmian_defaults(), {}, run_bohmian},
      {"relativity_contraction", "Lorentz vs Galilean boosts: non-uniform convergence and velocity composition",
       relativity_defaults(), {}, run_relativity},
      {"spreading_persistence", "free-packet spreading law and the trajectory persistence estimate",
       spreading_defaults(), {}, run_spreading},
  };
  return defs;
}

} // namespace detail

RunReport run_scenario(const ScenarioConfig& config)
{
  const auto& def = detail::find(config.scenario);
  const json params = merge_params(config.scenario, config.params);

  RunReport report;
  report.scenario = config.scenario;
  report.config = {{"scenario", config.scenario}, {"params", params}};
  const auto wall = std::chrono::system_clock::now();
  const auto start = std::chrono::steady_clock::now();
  detail::Context ctx(params, report);
  try {
    def.run(ctx);
  } catch (const NumericalError& e) {
    throw NumericalError(config.scenario + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(config.scenario + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(config.scenario + ": " + e.what());
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& s : report.series) report.series_paths.push_back("series/" + s.name + ".csv");

  if (!config.out_dir.empty()) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(wall);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    const json meta = {{"scenario", config.scenario},
                       {"started_utc", stamp},
                       {"elapsed_seconds", elapsed},
                       {"threads", max_threads()}};
    write_outputs(report, config.out_dir, meta);
  }
  return report;
}

} // namespace reductcheck::scenarios
