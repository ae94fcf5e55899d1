#include "reductcheck/bohmian/bohmian.hpp"

#include "reductcheck/error.hpp"
#include "reductcheck/fft.hpp"
#include "reductcheck/kernels.hpp"
#include "../kernels/interp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <memory>
#include <numbers>
#include <random>

namespace reductcheck {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::uint8_t> density_mask(const GridWavefunction& w, double eps_node, std::vector<double>& density)
{
  density.resize(w.psi.size());
  double peak = 0.0;
  for (std::size_t j = 0; j < w.psi.size(); ++j) {
    density[j] = std::norm(w.psi[j]);
    peak = std::max(peak, density[j]);
  }
  std::vector<std::uint8_t> mask(w.psi.size());
  const double floor = eps_node * peak;
  for (std::size_t j = 0; j < w.psi.size(); ++j) mask[j] = density[j] < floor ? 1 : 0;
  return mask;
}

/// Index of the nearest unmasked node for every node (itself when unmasked).
std::vector<std::size_t> nearest_unmasked(const GridSpec& g, const std::vector<std::uint8_t>& mask)
{
  const std::size_t n = mask.size();
  std::vector<std::size_t> source(n, n);
  std::deque<std::size_t> queue;
  for (std::size_t j = 0; j < n; ++j) {
    if (!mask[j]) {
      source[j] = j;
      queue.push_back(j);
    }
  }
  if (queue.empty()) throw NumericalError("wavefunction vanishes on the whole grid");
  const std::size_t n1 = g.dim == 1 ? 1 : g.n[1];
  const std::size_t n0 = g.n[0];
  while (!queue.empty()) {
    const std::size_t j = queue.front();
    queue.pop_front();
    const std::size_t i0 = j / n1;
    const std::size_t i1 = j % n1;
    std::size_t nb[4];
    int count = 0;
    if (i0 > 0) nb[count++] = j - n1;
    if (i0 + 1 < n0) nb[count++] = j + n1;
    if (g.dim == 2) {
      if (i1 > 0) nb[count++] = j - 1;
      if (i1 + 1 < n1) nb[count++] = j + 1;
    }
    for (int c = 0; c < count; ++c) {
      if (source[nb[c]] == n) {
        source[nb[c]] = source[j];
        queue.push_back(nb[c]);
      }
    }
  }
  return source;
}

void sample_field(const GridSpec& g, const std::vector<double>& field, const std::vector<double>& pos,
                  std::vector<double>& out)
{
  out.resize(pos.size() / static_cast<std::size_t>(g.dim));
  if (g.dim == 1) kernels::sample_linear(field, g.lo[0], g.dx(0), pos, out);
  else kernels::sample_bilinear(field, g.n[0], g.n[1], g.lo[0], g.dx(0), g.lo[1], g.dx(1), pos, out);
}

void require_inside(const GridSpec& g, const std::vector<double>& pos, double time)
{
  const auto dim = static_cast<std::size_t>(g.dim);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const int a = static_cast<int>(k % dim);
    const double top = g.x(a, g.n[a] - 1);
    if (!(pos[k] >= g.lo[a] && pos[k] <= top)) {
      throw NumericalError("trajectory " + std::to_string(k / dim) + " left the grid at t=" + std::to_string(time));
    }
  }
}

using StepObserver =
    std::function<void(std::size_t step, double time, const GridWavefunction& psi, const std::vector<double>& pos,
                       const VelocityField& field)>;

/// Velocities at arbitrary points for one wavefunction. On a line psi and
/// psi' are Hermite-interpolated from spectral nodal derivatives and v is
/// formed at the point; in 2D the nodal field is interpolated bilinearly.
/// Points below the nodal threshold take the masked nodal field.
class PointVelocity {
public:
  PointVelocity(const GridWavefunction& w, double eps_node) : field(velocity_field(w, eps_node)), eps_(eps_node)
  {
    if (w.grid.dim != 1) return;
    psi_ = w.psi;
    d1_ = spectral_gradient(w, 0);
    GridWavefunction tmp = w;
    tmp.psi = d1_;
    d2_ = spectral_gradient(tmp, 0);
    mass_ = w.mass[0];
    for (const auto& z : psi_) peak_ = std::max(peak_, std::norm(z));
  }

  void component(int axis, const std::vector<double>& pos, std::vector<double>& out) const
  {
    const GridSpec& g = field.grid;
    if (g.dim != 1) {
      sample_field(g, field.v[axis], pos, out);
      return;
    }
    f_.resize(pos.size());
    df_.resize(pos.size());
    kernels::sample_hermite(psi_, d1_, g.lo[0], g.dx(0), pos, f_);
    kernels::sample_hermite(d1_, d2_, g.lo[0], g.dx(0), pos, df_);
    sample_field(g, field.v[0], pos, out);
    for (std::size_t k = 0; k < pos.size(); ++k) {
      const double rho = std::norm(f_[k]);
      if (rho >= eps_ * peak_) out[k] = (std::conj(f_[k]) * df_[k]).imag() / (mass_ * rho);
    }
  }

  /// Single-point 1D velocity; safe to call concurrently.
  double at(double x) const
  {
    const GridSpec& g = field.grid;
    const auto f = kernels::detail::hermite_at(psi_, d1_, g.lo[0], g.dx(0), x);
    const double rho = std::norm(f);
    if (rho < eps_ * peak_) return kernels::detail::lerp_at(field.v[0], g.lo[0], g.dx(0), x);
    const auto df = kernels::detail::hermite_at(d1_, d2_, g.lo[0], g.dx(0), x);
    return (std::conj(f) * df).imag() / (mass_ * rho);
  }

  VelocityField field;

private:
  double eps_;
  double mass_ = 1.0;
  double peak_ = 0.0;
  std::vector<std::complex<double>> psi_, d1_, d2_;
  mutable std::vector<std::complex<double>> f_, df_;
};

/// Shared RK2 loop; the observer sees the state at every step including the first.
/// Integrates dx/ds = (1 - s/h) v0(x) + (s/h) v1(x) over [0, h] with
/// Bogacki-Shampine 3(2) steps under an absolute local error bound. The
/// interpolated field is Lipschitz in x, so its exact flow keeps 1D
/// trajectories ordered; the error control keeps the numerical flow close
/// enough for that to survive the steep gradients at interference fringes.
double adaptive_step(const PointVelocity& v0, const PointVelocity& v1, double x, double h, double tol)
{
  auto f = [&](double s, double y) {
    const double w = s / h;
    return (1.0 - w) * v0.at(y) + w * v1.at(y);
  };
  double s = 0.0;
  double step = h;
  double k1 = f(0.0, x);
  int rejected = 0;
  while (s < h) {
    step = std::min(step, h - s);
    const double k2 = f(s + 0.5 * step, x + 0.5 * step * k1);
    const double k3 = f(s + 0.75 * step, x + 0.75 * step * k2);
    const double y = x + step * (2.0 * k1 + 3.0 * k2 + 4.0 * k3) / 9.0;
    const double k4 = f(s + step, y);
    const double err = step * std::abs(-5.0 * k1 / 72.0 + k2 / 12.0 + k3 / 9.0 - k4 / 8.0);
    if (err <= tol || step < 1e-12 * h) {
      s += step;
      x = y;
      k1 = k4;
    } else if (++rejected > 100000) {
      throw NumericalError("trajectory step size collapsed");
    }
    const double grow = err > 0.0 ? 0.9 * std::cbrt(tol / err) : 4.0;
    step *= std::clamp(grow, 0.2, 4.0);
  }
  return x;
}

GridWavefunction run_lockstep(const QuantumModel& model, const GridWavefunction& psi0, std::vector<double>& pos,
                              double t, double dt, double eps_node, double step_tolerance, const StepObserver& observe)
{
  if (!(dt > 0.0) || !(t >= 0.0)) throw DomainError("advance needs dt > 0 and t >= 0");
  const GridSpec& g = model.grid;
  if (psi0.psi.size() != g.size()) throw DomainError("wavefunction does not match the model grid");
  require_inside(g, pos, 0.0);
  const auto n = t == 0.0 ? 0L : static_cast<long>(std::ceil(t / dt - 1e-12));
  const double h = n == 0 ? dt : t / static_cast<double>(n);
  SchrodingerPropagator prop(model, h);

  GridWavefunction psi = psi0;
  auto now = std::make_unique<PointVelocity>(psi, eps_node);
  if (observe) observe(0, 0.0, psi, pos, now->field);

  const auto dim = static_cast<std::size_t>(g.dim);
  const std::size_t count = pos.size() / dim;
  std::vector<double> mid(pos.size());
  std::vector<double> comp, comp_next;
  for (long s = 0; s < n; ++s) {
    prop.advance(psi, h);
    auto next = std::make_unique<PointVelocity>(psi, eps_node);
    if (dim == 1) {
      const PointVelocity& v0 = *now;
      const PointVelocity& v1 = *next;
      const auto m = static_cast<std::ptrdiff_t>(count);
#pragma omp parallel for schedule(dynamic, 16)
      for (std::ptrdiff_t k = 0; k < m; ++k) {
        const auto i = static_cast<std::size_t>(k);
        pos[i] = adaptive_step(v0, v1, pos[i], h, step_tolerance);
      }
      const double t_next = static_cast<double>(s + 1) * h;
      require_inside(g, pos, t_next);
      now = std::move(next);
      if (observe) observe(static_cast<std::size_t>(s + 1), t_next, psi, pos, now->field);
      continue;
    }
    for (std::size_t a = 0; a < dim; ++a) {
      now->component(static_cast<int>(a), pos, comp);
      for (std::size_t k = 0; k < count; ++k) mid[k * dim + a] = pos[k * dim + a] + 0.5 * h * comp[k];
    }
    const double t_mid = (static_cast<double>(s) + 0.5) * h;
    require_inside(g, mid, t_mid);
    // Midpoint velocity from the average of the fields at both ends of the step.
    for (std::size_t a = 0; a < dim; ++a) {
      now->component(static_cast<int>(a), mid, comp);
      next->component(static_cast<int>(a), mid, comp_next);
      for (std::size_t k = 0; k < count; ++k) pos[k * dim + a] += 0.5 * h * (comp[k] + comp_next[k]);
    }
    const double t_next = static_cast<double>(s + 1) * h;
    require_inside(g, pos, t_next);
    now = std::move(next);
    if (observe) observe(static_cast<std::size_t>(s + 1), t_next, psi, pos, now->field);
  }
  return psi;
}

double ks_against_weights(std::vector<double> samples, const std::vector<double>& weights, double lo, double dx)
{
  std::sort(samples.begin(), samples.end());
  std::vector<double> cum(weights.size() + 1, 0.0);
  for (std::size_t i = 0; i < weights.size(); ++i) cum[i + 1] = cum[i] + weights[i];
  const double total = cum.back();
  const double left = lo - 0.5 * dx;
  auto cdf = [&](double s) {
    const double u = (s - left) / dx;
    if (u <= 0.0) return 0.0;
    const auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= weights.size()) return 1.0;
    return (cum[i] + weights[i] * (u - static_cast<double>(i))) / total;
  };
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = cdf(samples[k]);
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

/// psi and its first three derivatives at arbitrary points by trigonometric
/// interpolation of the grid values (Nyquist mode dropped).
class SpectralLine {
public:
  struct Jet {
    std::complex<double> f, d1, d2, d3;
    double rho = 0.0;

    double velocity(double m) const { return rho > 0.0 ? (std::conj(f) * d1).imag() / (m * rho) : 0.0; }

    /// dv/dx
    double strain(double m) const
    {
      const double r1 = 2.0 * (std::conj(f) * d1).real();
      return ((std::conj(f) * d2).imag() * rho - (std::conj(f) * d1).imag() * r1) / (m * rho * rho);
    }

    /// d/dx of Q = -(1/2m) R''/R written through rho and its derivatives.
    double quantum_force_gradient(double m) const
    {
      const double r1 = 2.0 * (std::conj(f) * d1).real();
      const double r2 = 2.0 * (std::conj(f) * d2 + std::norm(d1)).real();
      const double r3 = 2.0 * (std::conj(f) * d3 + 3.0 * std::conj(d1) * d2).real();
      return -(r3 / rho - 2.0 * r1 * r2 / (rho * rho) + r1 * r1 * r1 / (rho * rho * rho)) / (4.0 * m);
    }
  };

  explicit SpectralLine(const GridWavefunction& w)
      : lo_(w.grid.lo[0]), n_(w.grid.n[0]), dk_(2.0 * std::numbers::pi / (w.grid.hi[0] - w.grid.lo[0]))
  {
    coef_.assign(w.psi.begin(), w.psi.end());
    FftPlan::for_shape({n_}).forward(coef_);
    double top = 0.0;
    for (auto& c : coef_) {
      c /= static_cast<double>(n_);
      top = std::max(top, std::abs(c));
    }
    // Sum only over the contiguous band of modes that carry amplitude.
    const long half = static_cast<long>(n_ / 2);
    j_lo_ = half - 1;
    j_hi_ = -(half - 1);
    for (long j = -(half - 1); j < half; ++j) {
      if (std::abs(coef_[slot(j)]) > 1e-13 * top) {
        j_lo_ = std::min(j_lo_, j);
        j_hi_ = std::max(j_hi_, j);
      }
    }
  }

  Jet eval(double x) const
  {
    const double u = x - lo_;
    const std::complex<double> step = std::polar(1.0, dk_ * u);
    std::complex<double> w = std::polar(1.0, dk_ * static_cast<double>(j_lo_) * u);
    const std::complex<double> i(0.0, 1.0);
    Jet jet;
    for (long j = j_lo_; j <= j_hi_; ++j) {
      const double k = dk_ * static_cast<double>(j);
      const std::complex<double> term = coef_[slot(j)] * w;
      jet.f += term;
      jet.d1 += i * k * term;
      jet.d2 += -k * k * term;
      jet.d3 += -i * k * k * k * term;
      w *= step;
    }
    jet.rho = std::norm(jet.f);
    return jet;
  }

private:
  std::size_t slot(long j) const
  {
    return j < 0 ? static_cast<std::size_t>(j + static_cast<long>(n_)) : static_cast<std::size_t>(j);
  }

  double lo_;
  std::size_t n_;
  double dk_;
  long j_lo_ = 0;
  long j_hi_ = -1;
  std::vector<std::complex<double>> coef_;
};

} // namespace

VelocityField velocity_field(const GridWavefunction& w, double eps_node)
{
  const GridSpec& g = w.grid;
  VelocityField f;
  f.grid = g;
  std::vector<double> density;
  f.nodal_mask = density_mask(w, eps_node, density);
  const bool any_masked = std::any_of(f.nodal_mask.begin(), f.nodal_mask.end(), [](std::uint8_t m) { return m != 0; });
  const std::vector<std::size_t> source = any_masked ? nearest_unmasked(g, f.nodal_mask) : std::vector<std::size_t>{};
  for (int a = 0; a < g.dim; ++a) {
    const auto grad = spectral_gradient(w, a);
    auto& v = f.v[a];
    v.resize(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) {
      v[j] = f.nodal_mask[j] ? 0.0 : (std::conj(w.psi[j]) * grad[j]).imag() / (w.mass[a] * density[j]);
    }
    if (any_masked) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        if (f.nodal_mask[j]) v[j] = v[source[j]];
      }
    }
  }
  return f;
}

BohmianEnsemble sample_born(const GridWavefunction& w, std::size_t n, std::uint64_t seed)
{
  if (n == 0) throw DomainError("sample_born needs n >= 1");
  const GridSpec& g = w.grid;
  BohmianEnsemble e;
  e.dim = g.dim;
  e.seed = seed;
  e.positions.reserve(n * static_cast<std::size_t>(g.dim));
  std::mt19937_64 rng(seed);
  std::vector<double> density(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) density[j] = std::norm(w.psi[j]);

  if (g.dim == 1) {
    std::vector<double> cum(g.size() + 1, 0.0);
    for (std::size_t j = 0; j < g.size(); ++j) cum[j + 1] = cum[j] + density[j];
    const double dx = g.dx(0);
    for (std::size_t k = 0; k < n; ++k) {
      const double u = uniform01(rng) * cum.back();
      auto it = std::upper_bound(cum.begin() + 1, cum.end(), u);
      const auto i = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cum.begin() - 1, g.size() - 1));
      const double frac = density[i] > 0.0 ? (u - cum[i]) / density[i] : 0.5;
      e.positions.push_back(g.x(0, i) - 0.5 * dx + std::clamp(frac, 0.0, 1.0) * dx);
    }
    return e;
  }

  const double peak = *std::max_element(density.begin(), density.end());
  if (!(peak > 0.0)) throw DomainError("cannot sample a vanishing wavefunction");
  const std::size_t cells = g.size();
  const std::size_t n1 = g.n[1];
  while (e.size() < n) {
    const auto j = std::min(static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cells)), cells - 1);
    if (uniform01(rng) * peak >= density[j]) continue;
    const double x = g.x(0, j / n1) + (uniform01(rng) - 0.5) * g.dx(0);
    const double y = g.x(1, j % n1) + (uniform01(rng) - 0.5) * g.dx(1);
    e.positions.push_back(x);
    e.positions.push_back(y);
  }
  return e;
}

double equivariance_distance(const BohmianEnsemble& e, const GridWavefunction& w)
{
  const GridSpec& g = w.grid;
  if (e.dim != g.dim) throw DomainError("ensemble and wavefunction dimensions differ");
  if (e.size() == 0) throw DomainError("empty ensemble");
  if (g.dim == 1) {
    std::vector<double> weights(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) weights[j] = std::norm(w.psi[j]);
    return ks_against_weights(e.positions, weights, g.lo[0], g.dx(0));
  }
  const std::size_t n0 = g.n[0];
  const std::size_t n1 = g.n[1];
  std::vector<double> wx(n0, 0.0), wy(n1, 0.0);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double d = std::norm(w.psi[i * n1 + j]);
      wx[i] += d;
      wy[j] += d;
    }
  }
  std::vector<double> xs(e.size()), ys(e.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    xs[k] = e.positions[2 * k];
    ys[k] = e.positions[2 * k + 1];
  }
  return std::max(ks_against_weights(xs, wx, g.lo[0], g.dx(0)), ks_against_weights(ys, wy, g.lo[1], g.dx(1)));
}

BohmianRun advance_trajectories(const QuantumModel& model, const GridWavefunction& psi0,
                                const BohmianEnsemble& ensemble, double t, double dt, const AdvanceOptions& options)
{
  if (ensemble.dim != model.grid.dim) throw DomainError("ensemble and grid dimensions differ");
  BohmianRun run;
  run.ensemble = ensemble;
  const auto dim = static_cast<std::size_t>(ensemble.dim);
  const std::size_t logged = std::min(options.log_cap, ensemble.size());
  run.log.dim = ensemble.dim;
  for (std::size_t k = 0; k < logged; ++k) run.log.ids.push_back(k);
  run.log.near_node.assign(logged, 0);
  const std::size_t stride = std::max<std::size_t>(1, options.log_stride);

  std::vector<double> mask_field;
  std::vector<double> near;
  auto observe = [&](std::size_t step, double time, const GridWavefunction&, const std::vector<double>& pos,
                     const VelocityField& field) {
    if (logged == 0) return;
    std::vector<double> head(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(logged * dim));
    mask_field.assign(field.nodal_mask.begin(), field.nodal_mask.end());
    sample_field(model.grid, mask_field, head, near);
    for (std::size_t k = 0; k < logged; ++k) {
      if (near[k] > 0.0) run.log.near_node[k] = 1;
    }
    // The final state is always logged.
    if (step % stride == 0 || std::abs(time - t) <= 1e-12 * std::max(1.0, t)) {
      run.log.times.push_back(time);
      run.log.frames.push_back(std::move(head));
    }
  };
  run.psi = run_lockstep(model, psi0, run.ensemble.positions, t, dt, options.eps_node, options.step_tolerance, observe);
  return run;
}

std::vector<double> quantum_potential(const GridWavefunction& w, double eps_node, std::vector<std::uint8_t>* mask_out)
{
  const GridSpec& g = w.grid;
  std::vector<double> density;
  const auto mask = density_mask(w, eps_node, density);
  std::vector<cplx> r(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) r[j] = std::sqrt(density[j]);
  const FftPlan& plan = FftPlan::for_shape(g.shape());
  plan.forward(r);
  std::vector<double> weight(g.size(), 0.0);
  for (int a = 0; a < g.dim; ++a) {
    const auto k = g.wavenumbers(a);
    for (std::size_t j = 0; j < k.size(); ++j) weight[j] += k[j] * k[j] / (2.0 * w.mass[a]);
  }
  // -sum_a d_a^2 R / (2 m_a) in k-space is + sum_a k_a^2 / (2 m_a) R(k).
  for (std::size_t j = 0; j < g.size(); ++j) r[j] *= weight[j];
  plan.backward(r);
  std::vector<double> q(g.size(), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!mask[j]) q[j] = r[j].real() / std::sqrt(density[j]);
  }
  if (mask_out) *mask_out = mask;
  return q;
}

CrossingResult no_crossing_check(const TrajectoryLog& log, double tol)
{
  if (log.dim != 1) throw DomainError("no_crossing_check needs 1D trajectories");
  CrossingResult r;
  if (log.frames.empty()) return r;
  const std::size_t n = log.frames.front().size();
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = k;
  const auto& first = log.frames.front();
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return first[a] < first[b]; });
  for (std::size_t s = 0; s < log.frames.size(); ++s) {
    const auto& f = log.frames[s];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      if (f[order[k]] - f[order[k + 1]] > tol) {
        r.holds = false;
        r.violation = CrossingViolation{s, log.ids.empty() ? order[k] : log.ids[order[k]],
                                        log.ids.empty() ? order[k + 1] : log.ids[order[k + 1]]};
        return r;
      }
    }
  }
  return r;
}

SupportRegion epsilon_support(const GridWavefunction& w, double eps)
{
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  const GridSpec& g = w.grid;
  SupportRegion region;
  region.component.assign(g.size(), -1);
  std::vector<std::uint8_t> inside(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    inside[j] = std::abs(w.psi[j]) > eps ? 1 : 0;
    region.n_cells += inside[j];
  }
  const std::size_t n1 = g.dim == 1 ? 1 : g.n[1];
  const std::size_t n0 = g.n[0];
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < g.size(); ++start) {
    if (!inside[start] || region.component[start] >= 0) continue;
    const int label = region.n_components++;
    region.component[start] = label;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      const std::size_t i0 = j / n1;
      const std::size_t i1 = j % n1;
      std::size_t nb[4];
      int count = 0;
      if (i0 > 0) nb[count++] = j - n1;
      if (i0 + 1 < n0) nb[count++] = j + n1;
      if (g.dim == 2) {
        if (i1 > 0) nb[count++] = j - 1;
        if (i1 + 1 < n1) nb[count++] = j + 1;
      }
      for (int c = 0; c < count; ++c) {
        if (inside[nb[c]] && region.component[nb[c]] < 0) {
          region.component[nb[c]] = label;
          stack.push_back(nb[c]);
        }
      }
    }
  }
  return region;
}

int support_label_at(const SupportRegion& region, const GridSpec& g, std::array<double, 2> point)
{
  std::size_t flat = 0;
  for (int a = 0; a < g.dim; ++a) {
    const double u = std::round((point[a] - g.lo[a]) / g.dx(a));
    if (u < 0.0 || u >= static_cast<double>(g.n[a])) return -1;
    flat = flat * (a == 0 ? 1 : g.n[1]) + static_cast<std::size_t>(u);
  }
  return region.component[flat];
}

NewtonLawCheck bohmian_newton_check(const QuantumModel& model, const GridWavefunction& psi0,
                                    const BohmianEnsemble& ensemble, double t, double dt, double floor,
                                    double density_floor)
{
  const GridSpec& g = model.grid;
  if (g.dim != 1 || ensemble.dim != 1) throw DomainError("the Newton-law check runs on a line");
  if (!(dt > 0.0) || !(t > 0.0)) throw DomainError("the Newton-law check needs dt > 0 and t > 0");
  const auto steps = static_cast<long>(std::ceil(t / dt - 1e-12));
  const double h = t / static_cast<double>(steps);
  const double m = model.mass[0];
  const std::size_t count = ensemble.size();
  SchrodingerPropagator prop(model, h);

  GridWavefunction psi = psi0;
  std::optional<SpectralLine> before;
  SpectralLine now(psi);
  std::vector<double> pos = ensemble.positions;

  NewtonLawCheck out;
  std::vector<std::uint8_t> used(count), skipped(count);
  std::vector<double> worst(count, 0.0);
  for (long s = 0; s <= steps; ++s) {
    std::optional<SpectralLine> after;
    if (s < steps) {
      prop.advance(psi, h);
      after.emplace(psi);
    }
    double peak = 0.0;
    for (const auto& z : psi.psi) peak = std::max(peak, std::norm(z));
    if (before && after) {
      // q'' as the material derivative of the guidance field at each point.
#pragma omp parallel for schedule(static)
      for (std::size_t k = 0; k < count; ++k) {
        used[k] = skipped[k] = 0;
        const double x = pos[k];
        const auto jet = now.eval(x);
        if (jet.rho < density_floor * peak) {
          skipped[k] = 1;
          continue;
        }
        double gv = 0.0;
        model.potential.gradient(std::span<const double>(&pos[k], 1), std::span<double>(&gv, 1));
        const double gq = jet.quantum_force_gradient(m);
        const double scale = std::max(std::abs(gv), std::abs(gq));
        if (scale < floor) {
          skipped[k] = 1;
          continue;
        }
        const double dvdt = (after->eval(x).velocity(m) - before->eval(x).velocity(m)) / (2.0 * h);
        const double acc = dvdt + jet.velocity(m) * jet.strain(m);
        worst[k] = std::max(worst[k], std::abs(m * acc + gv + gq) / scale);
        used[k] = 1;
      }
      for (std::size_t k = 0; k < count; ++k) {
        out.used += used[k];
        out.skipped += skipped[k];
      }
    }
    if (!after) break;
    // Midpoint step through the time-averaged field.
#pragma omp parallel for schedule(static)
    for (std::size_t k = 0; k < count; ++k) {
      const double mid = pos[k] + 0.5 * h * now.eval(pos[k]).velocity(m);
      pos[k] += 0.5 * h * (now.eval(mid).velocity(m) + after->eval(mid).velocity(m));
    }
    before.emplace(std::move(now));
    now = std::move(*after);
  }
  for (double w : worst) out.max_relative = std::max(out.max_relative, w);
  return out;
}

TwoPacketReport two_packet_scenario(bool with_environment, const TwoPacketParams& prm)
{
  const GridSpec& line = prm.grid;
  if (line.dim != 1) throw ConfigError("two-packet grid must be 1D (the environment axis is added)");
  const double q1 = -0.5 * prm.separation;
  const double q2 = 0.5 * prm.separation;

  GridWavefunction psi;
  QuantumModel model;
  if (!with_environment) {
    psi = make_gaussian(line, q1, prm.p, prm.width, prm.mass);
    const GridWavefunction right = make_gaussian(line, q2, -prm.p, prm.width, prm.mass);
    for (std::size_t j = 0; j < psi.psi.size(); ++j) psi.psi[j] += right.psi[j];
    model = make_quantum_model(line, {prm.mass, prm.mass}, free_potential());
  } else {
    const GridSpec plane =
        GridSpec::plane(line.lo[0], line.hi[0], line.n[0], prm.env_lo, prm.env_hi, prm.env_points);
    const double y_off = 0.5 * prm.env_separation_widths * prm.env_width;
    const double y1 = prm.identical_environment ? 0.0 : -y_off;
    const double y2 = prm.identical_environment ? 0.0 : y_off;
    psi = make_gaussian_2d(plane, {q1, y1}, {prm.p, 0.0}, {prm.width, prm.env_width}, {prm.mass, prm.env_mass});
    const GridWavefunction right =
        make_gaussian_2d(plane, {q2, y2}, {-prm.p, 0.0}, {prm.width, prm.env_width}, {prm.mass, prm.env_mass});
    for (std::size_t j = 0; j < psi.psi.size(); ++j) psi.psi[j] += right.psi[j];
    model = make_quantum_model(plane, {prm.mass, prm.env_mass}, free_potential());
  }
  const double nrm = psi.norm();
  for (auto& a : psi.psi) a /= nrm;

  double peak = 0.0;
  for (const auto& a : psi.psi) peak = std::max(peak, std::abs(a));
  const SupportRegion support = epsilon_support(psi, prm.support_eps * peak);
  const double y_left = with_environment && !prm.identical_environment ? -0.5 * prm.env_separation_widths * prm.env_width : 0.0;
  const int left_label = support_label_at(support, psi.grid, {q1, y_left});
  const int right_label = support_label_at(support, psi.grid, {q2, -y_left});
  if (support.n_components != 2 || left_label < 0 || right_label < 0 || left_label == right_label) {
    throw ConfigError("packets are not disjoint at the support threshold");
  }

  const std::size_t n_total = std::max(prm.n_equivariance, prm.n_trajectories);
  const BohmianEnsemble start = sample_born(psi, n_total, prm.seed);
  TwoPacketReport rep;
  rep.with_environment = with_environment;
  rep.n_trajectories = prm.n_trajectories;
  rep.ks_initial = equivariance_distance(start, psi);

  AdvanceOptions opt;
  opt.log_cap = prm.n_trajectories;
  const BohmianRun run = advance_trajectories(model, psi, start, prm.t_end, prm.dt, opt);
  rep.ks_final = equivariance_distance(run.ensemble, run.psi);
  rep.norm_drift = std::abs(run.psi.norm() - 1.0);
  rep.log = run.log;

  const auto dim = static_cast<std::size_t>(start.dim);
  std::size_t reversed = 0, passed = 0;
  for (std::size_t k = 0; k < prm.n_trajectories; ++k) {
    std::array<double, 2> p0{start.positions[k * dim], dim == 2 ? start.positions[k * dim + 1] : 0.0};
    const int label = support_label_at(support, psi.grid, p0);
    if (label != left_label && label != right_label) continue;
    ++rep.n_in_support;
    const bool from_left = label == left_label;
    const bool ends_left = run.ensemble.positions[k * dim] < 0.0;
    (from_left == ends_left ? reversed : passed) += 1;
    if (dim == 2 && !prm.identical_environment) {
      const bool y_low = p0[1] < 0.0;
      for (const auto& frame : run.log.frames) {
        if ((frame[k * dim + 1] < 0.0) != y_low) {
          ++rep.env_migrations;
          break;
        }
      }
    }
  }
  for (auto f : run.log.near_node) rep.near_node += f;
  if (rep.n_in_support > 0) {
    rep.reversed_fraction = static_cast<double>(reversed) / static_cast<double>(rep.n_in_support);
    rep.pass_through_fraction = static_cast<double>(passed) / static_cast<double>(rep.n_in_support);
  }
  if (!with_environment) rep.no_crossing = no_crossing_check(run.log, 0.0).holds;
  return rep;
}

} // namespace reductcheck
