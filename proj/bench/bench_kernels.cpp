// Parallel kernels against their serial references.

#include "reductcheck/kernels.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

namespace k = reductcheck::kernels;
using cplx = std::complex<double>;

namespace {

std::vector<cplx> random_cplx(std::size_t n)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(d(rng), d(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, double lo, double hi)
{
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

template <bool Parallel>
void apply_phase(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  auto psi = random_cplx(n);
  const auto angle = random_real(n, -3.0, 3.0);
  for (auto _ : state) {
    if constexpr (Parallel) k::apply_phase(psi, angle, 1e-3);
    else k::serial::apply_phase(psi, angle, 1e-3);
    benchmark::DoNotOptimize(psi.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void density_sum(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto psi = random_cplx(n);
  const auto w = random_real(n, 0.0, 1.0);
  for (auto _ : state) {
    double s = Parallel ? k::weighted_density_sum(psi, w) : k::serial::weighted_density_sum(psi, w);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n));
}

template <bool Parallel>
void double_commutator(benchmark::State& state)
{
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXcd rho = Eigen::MatrixXcd::Random(n, n);
  const auto x = random_real(static_cast<std::size_t>(n), -5.0, 5.0);
  Eigen::MatrixXcd out;
  for (auto _ : state) {
    if constexpr (Parallel) k::double_commutator_x(rho, x, out);
    else k::serial::double_commutator_x(rho, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(n * n));
}

template <bool Parallel>
void hermite(benchmark::State& state)
{
  const std::size_t nodes = 256;
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto f = random_cplx(nodes);
  const auto df = random_cplx(nodes);
  const auto pos = random_real(m, 0.0, 25.5);
  std::vector<cplx> out(m);
  for (auto _ : state) {
    if constexpr (Parallel) k::sample_hermite(f, df, 0.0, 0.1, pos, out);
    else k::serial::sample_hermite(f, df, 0.0, 0.1, pos, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m));
}

template <bool Parallel>
void bilinear(benchmark::State& state)
{
  const std::size_t n0 = 128, n1 = 128;
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto field = random_real(n0 * n1, -1.0, 1.0);
  const auto pos = random_real(2 * m, 0.0, 12.7);
  std::vector<double> out(m);
  for (auto _ : state) {
    if constexpr (Parallel) k::sample_bilinear(field, n0, n1, 0.0, 0.1, 0.0, 0.1, pos, out);
    else k::serial::sample_bilinear(field, n0, n1, 0.0, 0.1, 0.0, 0.1, pos, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m));
}

} // namespace

BENCHMARK(apply_phase<false>)->Name("apply_phase/serial")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(apply_phase<true>)->Name("apply_phase/omp")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(density_sum<false>)->Name("weighted_density_sum/serial")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(density_sum<true>)->Name("weighted_density_sum/omp")->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(double_commutator<false>)->Name("double_commutator_x/serial")->Arg(64)->Arg(256);
BENCHMARK(double_commutator<true>)->Name("double_commutator_x/omp")->Arg(64)->Arg(256);
BENCHMARK(hermite<false>)->Name("sample_hermite/serial")->Arg(1000)->Arg(10000);
BENCHMARK(hermite<true>)->Name("sample_hermite/omp")->Arg(1000)->Arg(10000);
BENCHMARK(bilinear<false>)->Name("sample_bilinear/serial")->Arg(1000)->Arg(10000);
BENCHMARK(bilinear<true>)->Name("sample_bilinear/omp")->Arg(1000)->Arg(10000);

BENCHMARK_MAIN();
