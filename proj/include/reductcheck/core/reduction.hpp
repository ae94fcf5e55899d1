#pragma once

// Models of dynamical systems, bridge maps between their state spaces, and
// the checks that a bridge commutes with the two dynamics (state and
// differential form), with their symmetries, and under composition.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace reductcheck {

/// A point of a model's state space. Real state spaces use the real part.
struct NormedState {
  std::string space;
  Eigen::VectorXcd coords;
};

/// A state-space automorphism; time-dependent actions read `t`.
struct SymmetryTransform {
  std::string name;
  std::vector<double> params;
  std::function<NormedState(const NormedState&, double t)> action;
  bool time_dependent = false;
};

struct DynamicalModel {
  std::string id;
  std::size_t dimension = 0;
  std::function<double(const NormedState&, const NormedState&)> norm;
  /// States D(t, x0) at each of the sorted, nonnegative `times`.
  std::function<std::vector<NormedState>(std::span<const double> times, const NormedState& x0)> trajectory;
  /// Right-hand side f(x) of dx/dt = f(x), when the model has one.
  std::function<NormedState(const NormedState&)> vector_field;
  std::vector<SymmetryTransform> symmetries;

  NormedState evolve(double t, const NormedState& x0) const;
  const SymmetryTransform* find_symmetry(const std::string& name) const;
};

/// A time-independent map S_low -> S_high with a validity domain.
struct BridgeMap {
  std::string low_model_id;
  std::string high_model_id;
  std::function<NormedState(const NormedState&)> map;
  /// Draws up to n states of the domain; deterministic in the seed.
  std::function<std::vector<NormedState>(std::uint64_t seed, std::size_t n)> sampler;
  std::function<bool(const NormedState&)> predicate;
};

struct ReductionSpec {
  double delta = 0.0;
  double tau = 0.0;
  std::vector<double> time_grid;
  std::size_t n_domain_samples = 1;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError unless delta>0, tau>0 and the grid is sorted in [0,tau] from 0.
  void validate() const;
};

/// Times 0, step, 2*step, ... up to tau (tau itself included).
std::vector<double> uniform_time_grid(double tau, double step);

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct SampleTrace {
  std::vector<double> times;
  std::vector<double> residuals;
  double max_residual = 0.0;
  double tau_max = 0.0;
};

struct SymmetryResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  Verdict verdict = Verdict::inconclusive;
};

struct ReductionReport {
  std::string low_id;
  std::string high_id;
  double delta = 0.0;
  double tau = 0.0;
  std::vector<SampleTrace> traces;
  double max_residual = 0.0;
  /// Largest grid time up to which every sample stays below delta.
  double tau_max = 0.0;
  std::vector<SymmetryResult> symmetry_results;
  Verdict verdict = Verdict::inconclusive;
};

/// ||B(D_l(t; x0)) - D_h(t; B(x0))|| in the high-level norm.
double dsr_residual(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                    const NormedState& x0_low, double t);

/// Residual at every time of `times` for one initial state.
SampleTrace dsr_trace(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                      const NormedState& x0_low, std::span<const double> times, double delta);

/// Evaluates the residual on every (sample, grid time). Samples run in parallel.
ReductionReport check_dsr(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                          const ReductionSpec& spec);

/// Same as check_dsr with an explicit list of initial states.
ReductionReport check_dsr_on(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                             const ReductionSpec& spec, const std::vector<NormedState>& samples);

/// ||d/dt B(x_l(t)) - f_h(B(x_l(t)))|| with a central difference of step fd_step
/// (one-sided second order when t < fd_step).
double dsr_differential_residual(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                                 const NormedState& x0_low, double t, double fd_step);

/// max over samples of ||T_h(B(x)) - B(T_l(x))|| at action time t. Samples whose
/// image leaves the bridge domain are excluded; all excluded gives inconclusive.
SymmetryResult check_symmetry_commutation(const DynamicalModel& low, const DynamicalModel& high,
                                          const BridgeMap& bridge, const SymmetryTransform& t_high,
                                          const SymmetryTransform& t_low, const std::vector<NormedState>& samples,
                                          double tol, double t = 0.0);

struct SymmetryPair {
  SymmetryTransform high;
  SymmetryTransform low;
};

/// Composition check for T1 after T2. Both pairs must first pass individually;
/// otherwise ConfigError.
SymmetryResult check_symmetry_group(const DynamicalModel& low, const DynamicalModel& high, const BridgeMap& bridge,
                                    const SymmetryPair& pair1, const SymmetryPair& pair2,
                                    const std::vector<NormedState>& samples, double tol, double t = 0.0);

/// T1 after T2 as a single transform.
SymmetryTransform compose_symmetries(const SymmetryTransform& t1, const SymmetryTransform& t2);

/// B31 = B21 after B32 on the domain d2 intersected with the preimage of d1.
BridgeMap compose_bridges(const BridgeMap& b21, const BridgeMap& b32);

struct TransitivityReport {
  ReductionReport r21;
  ReductionReport r32;
  ReductionReport r31;
  /// Empirical Lipschitz bound of B21 over the sampled part of its domain.
  double lipschitz_k = 0.0;
  double tau_composed = 0.0;
  double delta21 = 0.0;
  double delta32 = 0.0;
  /// Largest composed residual over times up to tau_composed.
  double composed_residual = 0.0;
  /// composed_residual < delta21 + K * delta32 (requires both components to pass).
  bool bound_holds = false;
};

/// Runs the three reductions of the chain M3 -> M2 -> M1. The components are
/// judged at delta21 and delta32, the composed bridge at spec.delta.
TransitivityReport check_transitivity(const DynamicalModel& m1, const DynamicalModel& m2, const DynamicalModel& m3,
                                      const BridgeMap& b21, const BridgeMap& b32, const ReductionSpec& spec,
                                      double delta21, double delta32);

/// Weighted sup norm max(|dq|/q_scale, |dp|/p_scale) over a phase-space vector
/// laid out as (q..., p...).
std::function<double(const NormedState&, const NormedState&)> weighted_sup_norm(double q_scale, double p_scale);

} // namespace reductcheck
