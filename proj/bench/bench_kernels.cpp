// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "chirocool/liouvillian.hpp"
#include "chirocool/reduced.hpp"
#include "chirocool/sweep.hpp"

using namespace chirocool;

namespace {

ChainConfig chain(int n_ions, int n_max) {
  ChainConfig c;
  c.n_ions = n_ions;
  c.eta = 0.04;
  c.omega.assign(static_cast<std::size_t>(n_ions), 0.1);
  c.omega[0] = 1.0;
  c.gamma_r = 0.085;
  c.gamma_l = 0.015;
  c.n_max = n_max;
  return c;
}

Matrix random_hermitian(long d) {
  std::mt19937 gen(7);
  std::normal_distribution<double> nd;
  Matrix m(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j) m(i, j) = cplx(nd(gen), nd(gen));
  return 0.5 * (m + m.adjoint());
}

template <bool Parallel>
void BM_Apply(benchmark::State& state) {
  const auto l = Liouvillian::from_config(chain(static_cast<int>(state.range(0)), static_cast<int>(state.range(1))));
  const Matrix rho = random_hermitian(l.dim());
  Matrix out(l.dim(), l.dim());
  for (auto _ : state) {
    if constexpr (Parallel) l.apply_to(rho, out);
    else l.apply_serial_to(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = static_cast<double>(l.dim());
}

template <bool Parallel>
void BM_MinSearch(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = Parallel ? reduced::min_search(n, 0.1, 0.04, 1.0) : reduced::min_search_serial(n, 0.1, 0.04, 1.0);
    benchmark::DoNotOptimize(r);
  }
}

void BM_SteadySweep(benchmark::State& state) {
  sweep::SweepSpec s = sweep::figure_preset("fig2a");
  s.axis1.points = 11;
  s.axis2->points = 6;
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep::run_grid(s, workers));
}

}  // namespace

BENCHMARK(BM_Apply<false>)->Args({2, 4})->Args({3, 2})->Args({3, 4})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Apply<true>)->Args({2, 4})->Args({3, 2})->Args({3, 4})->Unit(benchmark::kMicrosecond)->UseRealTime();
BENCHMARK(BM_MinSearch<false>)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MinSearch<true>)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SteadySweep)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
