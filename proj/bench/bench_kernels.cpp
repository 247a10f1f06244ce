// Benchmarks comparing the serial reference path against the OpenMP path for
// the two data-parallel kernels: the pointwise identity sweep and the
// quadrature energy assembly. Falls back to a plain timing loop when Google
// Benchmark is unavailable.
#include "crlab/quadrature.hpp"
#include "crlab/verify.hpp"

using namespace crlab;

namespace {

struct Fixture {
  ModelPtr model = make_sphere(1);
  TargetPtr target = make_bergman_ball(2);
  SmoothMap map;
  std::vector<Point> pts;
  QuadratureRule rule;

  Fixture() {
    MapSpec spec;
    spec.name = "perturbed-cr";
    spec.r = 0.5;
    spec.eps = 0.4;
    map = make_map(spec, model->layout, 2);
    pts = sample_points(*model, 24, 7);
    rule = make_rule(*model, 20, RuleKind::ProductDeterministic);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

double run_commutators(bool parallel) {
  Fixture& f = fixture();
  auto reports = check_commutators(*f.model, *f.target, f.map, f.pts, 1e-5, {}, parallel);
  return reports.front().max_residual;
}

double run_energy(bool parallel) {
  Fixture& f = fixture();
  return energy(*f.model, *f.target, f.map, f.rule, {}, parallel);
}

}  // namespace

#ifdef CRLAB_HAVE_GBENCH
#include <benchmark/benchmark.h>

static void BM_CommutatorSweepSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_commutators(false));
}
static void BM_CommutatorSweepOpenMP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_commutators(true));
}
static void BM_EnergyAssemblySerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_energy(false));
}
static void BM_EnergyAssemblyOpenMP(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_energy(true));
}
BENCHMARK(BM_CommutatorSweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CommutatorSweepOpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyAssemblySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnergyAssemblyOpenMP)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();

#else
#include <chrono>
#include <cstdio>

int main() {
  auto time_of = [](auto&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 3; ++i) fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
               .count() /
           3.0;
  };
  std::printf("commutator sweep  serial %8.2f ms   openmp %8.2f ms\n",
              time_of([] { run_commutators(false); }), time_of([] { run_commutators(true); }));
  std::printf("energy assembly   serial %8.2f ms   openmp %8.2f ms\n",
              time_of([] { run_energy(false); }), time_of([] { run_energy(true); }));
  return 0;
}
#endif
