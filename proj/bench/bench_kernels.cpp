// Serial reference kernels against their OpenMP counterparts on n^3 grids.

#include <benchmark/benchmark.h>

#include <random>

#include "bifluid/elliptic.hpp"
#include "bifluid/kernels.hpp"

namespace {

using namespace bifluid;

Grid cube(int n) {
  const std::array<double, 3> e{1.0, 1.0, 1.0};
  const std::array<int, 3> c{n, n, n};
  return build_grid(3, e, c);
}

std::vector<double> random_vector(std::size_t n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(gen);
  return v;
}

template <double (*Dot)(std::span<const double>, std::span<const double>)>
void BM_dot(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(n * n * n, 1), y = random_vector(n * n * n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Dot(x, y));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(x.size()));
}

template <void (*Axpy)(double, std::span<const double>, std::span<double>)>
void BM_axpy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = random_vector(n * n * n, 1);
  auto y = random_vector(n * n * n, 2);
  for (auto _ : state) {
    Axpy(1e-9, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(x.size()));
}

template <void (*Lap)(const Grid&, Ghost, std::span<const double>, std::span<double>, double, bool)>
void BM_laplacian(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  const auto in = random_vector(g.size(), 3);
  std::vector<double> out(g.size());
  for (auto _ : state) {
    Lap(g, Ghost::DirichletZero, in, out, 1.0, false);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(g.size()));
}

template <void (*Spmv)(const CsrMatrix&, std::span<const double>, std::span<double>)>
void BM_spmv(benchmark::State& state) {
  const Grid g = cube(static_cast<int>(state.range(0)));
  Field b(g, 1.0);
  const CsrMatrix a = robin_matrix(b, BoundaryField(boundary_faces(g).size(), 0.5));
  const auto x = random_vector(g.size(), 4);
  std::vector<double> y(g.size());
  for (auto _ : state) {
    Spmv(a, x, y);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(a.val.size()));
}

}  // namespace

BENCHMARK(BM_dot<bifluid::kernels::ref::dot>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_dot<bifluid::kernels::omp::dot>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_axpy<bifluid::kernels::ref::axpy>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_axpy<bifluid::kernels::omp::axpy>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_laplacian<bifluid::kernels::ref::laplacian>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_laplacian<bifluid::kernels::omp::laplacian>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_spmv<bifluid::kernels::ref::spmv>)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK(BM_spmv<bifluid::kernels::omp::spmv>)->Arg(16)->Arg(32)->Arg(64);

BENCHMARK_MAIN();
