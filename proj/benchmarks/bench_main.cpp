#include <benchmark/benchmark.h>

#include <cmath>

#include "ellab/dirichlet_solver.hpp"
#include "ellab/proportionality.hpp"
#include "ellab/radial_shooting.hpp"
#include "ellab/spherical_means.hpp"

using namespace ellab;

static void BM_ComputeKClosedForm(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_K({3, 1, 1, 1}, {0, 1, 1}).K);
}
BENCHMARK(BM_ComputeKClosedForm);

static void BM_ComputeKRootFind(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_K({2, 1, 1, 1}, {1, 2, 1}).K);
}
BENCHMARK(BM_ComputeKRootFind);

static void BM_ShootLinear(benchmark::State& state) {
  for (auto _ : state) {
    auto prof = integrate_ivp(3, [](double u) { return u; }, 1.0, 10.0);
    benchmark::DoNotOptimize(prof.size());
  }
}
BENCHMARK(BM_ShootLinear);

static void BM_ShootSupercritical(benchmark::State& state) {
  const auto f = counterexample_nonlinearity(6, 1);
  for (auto _ : state) {
    auto prof = integrate_ivp(3, f, 0.01, 1000.0);
    benchmark::DoNotOptimize(prof.size());
  }
}
BENCHMARK(BM_ShootSupercritical);

static void BM_NewtonRadial(benchmark::State& state) {
  ProblemInstance inst;
  inst.n = 3;
  inst.coeffs = {2, 2, 1, 1};
  inst.exps = {0, 2, 1};
  inst.domain = Domain::ball(1.0);
  inst.grid_h = 1.0 / static_cast<double>(state.range(0));
  const auto g = Grid::for_domain(inst.domain, 3, inst.grid_h);
  auto init = scalar_reduction_initializer(inst, g);
  for (auto& x : init.u) x *= 1.2;
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(init, inst).report.iterations);
}
BENCHMARK(BM_NewtonRadial)->Arg(128)->Arg(256)->Arg(1024);

static void BM_NewtonBox(benchmark::State& state) {
  ProblemInstance inst;
  inst.n = 2;
  inst.coeffs = {2, 2, 1, 1};
  inst.exps = {0, 2, 1};
  inst.domain = Domain::box({1.0, 1.0});
  inst.grid_h = 1.0 / static_cast<double>(state.range(0));
  const auto g = Grid::for_domain(inst.domain, 2, inst.grid_h);
  auto init = scalar_reduction_initializer(inst, g);
  for (auto& x : init.u) x *= 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(init, inst).report.iterations);
}
BENCHMARK(BM_NewtonBox)->Arg(32)->Arg(64);

static void BM_HalfSphereMean(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto w = catalogue_field("superharmonic", n);
  const std::vector<double> y(n, 0.0);
  QuadratureConfig cfg;
  cfg.mc_samples = 100000;
  for (auto _ : state) benchmark::DoNotOptimize(half_sphere_mean(w, y, 8.0, n, cfg).value);
}
BENCHMARK(BM_HalfSphereMean)->Arg(2)->Arg(3)->Arg(4);

BENCHMARK_MAIN();
