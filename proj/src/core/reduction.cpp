#include "reductcheck/core/reduction.hpp"

#include "reductcheck/error.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

namespace reductcheck {

namespace {

void require_finite(const NormedState& x, const std::string& model, double t)
{
  if (!x.coords.allFinite()) {
    std::ostringstream msg;
    msg << "non-finite state in model '" << model << "' at t=" << t;
    throw NumericalError(msg.str());
  }
}

void require_space(const NormedState& x, const std::string& expected)
{
  if (x.space != expected) {
    throw DomainError("state of space '" + x.space + "' passed to '" + expected + "'");
  }
}

void require_in_domain(const BridgeMap& bridge, const NormedState& x)
{
  if (!bridge.predicate(x)) {
    throw DomainError("initial state outside the domain of bridge " + bridge.low_model_id + " -> " +
                      bridge.high_model_id);
  }
}

std::vector<NormedState> run(const DynamicalModel& m, std::span<const double> times, const NormedState& x0)
{
  require_space(x0, m.id);
  auto states = m.trajectory(times, x0);
  for (std::size_t k = 0; k < states.size(); ++k) require_finite(states[k], m.id, times[k]);
  return states;
}

double prefix_tau(std::span<const double> times, std::span<const double> residuals, double delta)
{
  double tau = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(residuals[k] < delta)) break;
    tau = times[k];
  }
  return tau;
}

} // namespace

NormedState DynamicalModel::evolve(double t, const NormedState& x0) const
{
  const double times[] = {t};
  return trajectory(times, x0).front();
}

const SymmetryTransform* DynamicalModel::find_symmetry(const std::string& name) const
{
  for (const auto& s : symmetries) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

void ReductionSpec::validate() const
{
  if (!(delta > 0.0)) throw ConfigError("delta must be positive");
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  if (time_grid.empty() || time_grid.front() != 0.0) throw ConfigError("time grid must start at 0");
  if (!std::is_sorted(time_grid.begin(), time_grid.end())) throw ConfigError("time grid must be sorted");
  if (time_grid.back() > tau * (1.0 + 1e-12)) throw ConfigError("time grid exceeds tau");
  if (n_domain_samples == 0) throw ConfigError("need at least one domain sample");
}

std::vector<double> uniform_time_grid(double tau, double step)
{
  if (!(step > 0.0) || !(tau >= 0.0)) throw ConfigError("time grid needs step>0 and tau>=0");
  const auto n = static_cast<std::size_t>(std::floor(tau / step + 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 2);
  for (std::size_t k = 0; k <= n; ++k) grid.push_back(static_cast<double>(k) * step);
  if (tau - grid.back() > 1e-9 * step) grid.push_back(tau);
  else grid.back() = tau;
  return grid;
}

const char* to_string(Verdict v)
{
  switch (v) {
  case Verdict::pass: return "pass";
  case Verdict::fail: return "fail";
  case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

double dsr_residual(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                    const NormedState& x0_low, double t)
{
  if (!(t >= 0.0)) throw DomainError("dsr_residual needs t >= 0");
  const double times[] = {t};
  return dsr_trace(low, high, bridge, x0_low, times, 0.0).residuals.front();
}

SampleTrace dsr_trace(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                      const NormedState& x0_low, std::span<const double> times, double delta)
{
  require_in_domain(bridge, x0_low);
  const auto low_states = run(low, times, x0_low);
  const NormedState x0_high = bridge.map(x0_low);
  const auto high_states = run(high, times, x0_high);

  SampleTrace trace;
  trace.times.assign(times.begin(), times.end());
  trace.residuals.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const NormedState image = bridge.map(low_states[k]);
    require_finite(image, bridge.high_model_id, times[k]);
    trace.residuals[k] = high.norm(image, high_states[k]);
  }
  trace.max_residual = trace.residuals.empty() ? 0.0 : *std::max_element(trace.residuals.begin(), trace.residuals.end());
  trace.tau_max = prefix_tau(trace.times, trace.residuals, delta);
  return trace;
}

ReductionReport check_dsr(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                          const ReductionSpec& spec)
{
  spec.validate();
  return check_dsr_on(low, high, bridge, spec, bridge.sampler(spec.rng_seed, spec.n_domain_samples));
}

ReductionReport check_dsr_on(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                             const ReductionSpec& spec, const std::vector<NormedState>& samples)
{
  spec.validate();
  if (samples.empty()) {
    throw EmptyDomainError("no domain samples for bridge " + bridge.low_model_id + " -> " + bridge.high_model_id);
  }
  ReductionReport report;
  report.low_id = low.id;
  report.high_id = high.id;
  report.delta = spec.delta;
  report.tau = spec.tau;
  report.traces.resize(samples.size());

  std::vector<std::exception_ptr> errors(samples.size());
  const auto n = static_cast<std::ptrdiff_t>(samples.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    try {
      report.traces[s] = dsr_trace(low, high, bridge, samples[s], spec.time_grid, spec.delta);
    } catch (...) {
      errors[s] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  report.tau_max = spec.time_grid.back();
  for (const auto& tr : report.traces) {
    report.max_residual = std::max(report.max_residual, tr.max_residual);
    report.tau_max = std::min(report.tau_max, tr.tau_max);
  }
  report.verdict = report.max_residual < spec.delta ? Verdict::pass : Verdict::fail;
  return report;
}

double dsr_differential_residual(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                                 const NormedState& x0_low, double t, double fd_step)
{
  if (!(fd_step > 0.0)) throw DomainError("fd_step must be positive");
  if (!(t >= 0.0)) throw DomainError("t must be nonnegative");
  if (!high.vector_field) throw ConfigError("model '" + high.id + "' has no vector field");
  require_in_domain(bridge, x0_low);

  Eigen::VectorXcd derivative;
  NormedState at_t;
  if (t >= fd_step) {
    const double times[] = {t - fd_step, t, t + fd_step};
    const auto xs = run(low, times, x0_low);
    const auto b0 = bridge.map(xs[0]);
    const auto b2 = bridge.map(xs[2]);
    at_t = bridge.map(xs[1]);
    derivative = (b2.coords - b0.coords) / (2.0 * fd_step);
  } else {
    const double times[] = {t, t + fd_step, t + 2.0 * fd_step};
    const auto xs = run(low, times, x0_low);
    at_t = bridge.map(xs[0]);
    const auto b1 = bridge.map(xs[1]);
    const auto b2 = bridge.map(xs[2]);
    derivative = (-3.0 * at_t.coords + 4.0 * b1.coords - b2.coords) / (2.0 * fd_step);
  }
  require_finite(at_t, high.id, t);
  const NormedState field = high.vector_field(at_t);
  return high.norm(NormedState{at_t.space, derivative}, field);
}

SymmetryResult check_symmetry_commutation(const DynamicalModel& low, const DynamicalModel& high,
                                          const BridgeMap& bridge, const SymmetryTransform& t_high,
                                          const SymmetryTransform& t_low, const std::vector<NormedState>& samples,
                                          double tol, double t)
{
  if (!low.find_symmetry(t_low.name)) {
    throw ConfigError("symmetry '" + t_low.name + "' is not registered on model '" + low.id + "'");
  }
  if (!high.find_symmetry(t_high.name)) {
    throw ConfigError("symmetry '" + t_high.name + "' is not registered on model '" + high.id + "'");
  }
  SymmetryResult result;
  result.name = t_high.name + "|" + t_low.name;
  result.tolerance = tol;
  for (const auto& x : samples) {
    if (!bridge.predicate(x)) {
      ++result.excluded;
      continue;
    }
    const NormedState tx = t_low.action(x, t);
    if (!bridge.predicate(tx)) {
      ++result.excluded;
      continue;
    }
    const double r = high.norm(t_high.action(bridge.map(x), t), bridge.map(tx));
    if (!std::isfinite(r)) throw NumericalError("non-finite symmetry residual for '" + result.name + "'");
    result.max_residual = std::max(result.max_residual, r);
    ++result.evaluated;
  }
  if (result.evaluated == 0) result.verdict = Verdict::inconclusive;
  else result.verdict = result.max_residual < tol ? Verdict::pass : Verdict::fail;
  return result;
}

SymmetryTransform compose_symmetries(const SymmetryTransform& t1, const SymmetryTransform& t2)
{
  SymmetryTransform c;
  c.name = t1.name + "*" + t2.name;
  c.params = t1.params;
  c.params.insert(c.params.end(), t2.params.begin(), t2.params.end());
  c.time_dependent = t1.time_dependent || t2.time_dependent;
  c.action = [a1 = t1.action, a2 = t2.action](const NormedState& x, double t) { return a1(a2(x, t), t); };
  return c;
}

SymmetryResult check_symmetry_group(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                                    const SymmetryPair& pair1, const SymmetryPair& pair2,
                                    const std::vector<NormedState>& samples, double tol, double t)
{
  for (const auto* pair : {&pair1, &pair2}) {
    const auto r = check_symmetry_commutation(low, high, bridge, pair->high, pair->low, samples, tol, t);
    if (r.verdict != Verdict::pass) {
      throw ConfigError("symmetry pair '" + r.name + "' does not pass individually (" + to_string(r.verdict) + ")");
    }
  }
  // The composite is checked against the registered components, so it is not
  // itself looked up in the registries.
  const SymmetryTransform ch = compose_symmetries(pair1.high, pair2.high);
  const SymmetryTransform cl = compose_symmetries(pair1.low, pair2.low);
  SymmetryResult result;
  result.name = ch.name + "|" + cl.name;
  result.tolerance = tol;
  for (const auto& x : samples) {
    if (!bridge.predicate(x)) {
      ++result.excluded;
      continue;
    }
    const NormedState tx = cl.action(x, t);
    if (!bridge.predicate(tx) || !bridge.predicate(pair2.low.action(x, t))) {
      ++result.excluded;
      continue;
    }
    const double r = high.norm(ch.action(bridge.map(x), t), bridge.map(tx));
    result.max_residual = std::max(result.max_residual, r);
    ++result.evaluated;
  }
  if (result.evaluated == 0) result.verdict = Verdict::inconclusive;
  else result.verdict = result.max_residual < tol ? Verdict::pass : Verdict::fail;
  return result;
}

BridgeMap compose_bridges(const BridgeMap& b21, const BridgeMap& b32)
{
  if (b21.low_model_id != b32.high_model_id) {
    throw CompositionError("cannot compose " + b21.low_model_id + " -> " + b21.high_model_id + " after " +
                           b32.low_model_id + " -> " + b32.high_model_id);
  }
  BridgeMap c;
  c.low_model_id = b32.low_model_id;
  c.high_model_id = b21.high_model_id;
  c.map = [m21 = b21.map, m32 = b32.map](const NormedState& x) { return m21(m32(x)); };
  c.predicate = [p21 = b21.predicate, p32 = b32.predicate, m32 = b32.map](const NormedState& x) {
    return p32(x) && p21(m32(x));
  };
  c.sampler = [s32 = b32.sampler, pred = c.predicate](std::uint64_t seed, std::size_t n) {
    std::vector<NormedState> kept;
    for (auto& x : s32(seed, n)) {
      if (pred(x)) kept.push_back(std::move(x));
    }
    return kept;
  };
  return c;
}

TransitivityReport check_transitivity(const DynamicalModel& m1, const DynamicalModel& m2, const DynamicalModel& m3,
                                      const BridgeMap& b21, const BridgeMap& b32, const ReductionSpec& spec,
                                      double delta21, double delta32)
{
  spec.validate();
  const BridgeMap b31 = compose_bridges(b21, b32);

  TransitivityReport out;
  out.delta21 = delta21;
  out.delta32 = delta32;

  ReductionSpec spec32 = spec;
  spec32.delta = delta32;
  out.r32 = check_dsr(m3, m2, b32, spec32);

  const auto samples3 = b31.sampler(spec.rng_seed, spec.n_domain_samples);

  // The B21 check must cover B32's image of the composed domain as well as
  // B21's own domain samples.
  std::vector<NormedState> samples2 = b21.sampler(spec.rng_seed, spec.n_domain_samples);
  for (const auto& x : samples3) samples2.push_back(b32.map(x));
  ReductionSpec spec21 = spec;
  spec21.delta = delta21;
  out.r21 = check_dsr_on(m2, m1, b21, spec21, samples2);

  if (samples3.empty()) {
    out.r31.low_id = m3.id;
    out.r31.high_id = m1.id;
    out.r31.delta = spec.delta;
    out.r31.tau = spec.tau;
    out.r31.verdict = Verdict::inconclusive;
  } else {
    out.r31 = check_dsr_on(m3, m1, b31, spec, samples3);
  }
  out.tau_composed = std::min(out.r21.tau_max, out.r32.tau_max);

  // Lipschitz estimate of B21: domain sample pairs plus the trajectory pairs
  // (B32(D3(t;x)), D2(t;B32(x))) that enter the composed bound.
  double k = 0.0;
  auto ratio = [&](const NormedState& a, const NormedState& b) {
    const double den = m2.norm(a, b);
    if (den > 1e-300) k = std::max(k, m1.norm(b21.map(a), b21.map(b)) / den);
  };
  for (std::size_t i = 0; i < samples2.size(); ++i) {
    for (std::size_t j = i + 1; j < samples2.size(); ++j) ratio(samples2[i], samples2[j]);
  }
  for (const auto& x : samples3) {
    const auto low = run(m3, spec.time_grid, x);
    const auto mid = run(m2, spec.time_grid, b32.map(x));
    for (std::size_t t = 0; t < low.size(); ++t) ratio(b32.map(low[t]), mid[t]);
  }
  out.lipschitz_k = k;

  for (const auto& tr : out.r31.traces) {
    for (std::size_t t = 0; t < tr.times.size() && tr.times[t] <= out.tau_composed; ++t) {
      out.composed_residual = std::max(out.composed_residual, tr.residuals[t]);
    }
  }
  out.bound_holds = out.r21.verdict == Verdict::pass && out.r32.verdict == Verdict::pass &&
                    out.r31.verdict != Verdict::inconclusive &&
                    out.composed_residual < delta21 + k * delta32;
  return out;
}

std::function<double(const NormedState&, const NormedState&)> weighted_sup_norm(double q_scale, double p_scale)
{
  if (!(q_scale > 0.0) || !(p_scale > 0.0)) throw ConfigError("norm scales must be positive");
  return [q_scale, p_scale](const NormedState& a, const NormedState& b) {
    const Eigen::Index n = a.coords.size();
    const Eigen::Index half = n / 2;
    double r = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double scale = i < half ? q_scale : p_scale;
      r = std::max(r, std::abs(a.coords[i] - b.coords[i]) / scale);
    }
    return r;
  };
}

} // namespace reductcheck
