#include <benchmark/benchmark.h>

#include <choquard/energy.hpp>
#include <choquard/log_kernel.hpp>
#include <choquard/mountain_pass.hpp>

#include <cmath>

using namespace choquard;

namespace {

GridField bump(const GridPtr& g, double cx, double a) {
  return GridField::sample(g, [=](Point p) {
    const double s = ((p.x - cx) * (p.x - cx) + p.y * p.y) / (a * a);
    return s < 1.0 ? (1 - s) * (1 - s) : 0.0;
  });
}

}  // namespace

static void BilinearFast(benchmark::State& state) {
  const auto g = build_grid(GridKind::cartesian, 4.0, static_cast<int>(state.range(0)));
  const auto u = bump(g, 0.5, 1.5), v = bump(g, -0.5, 2.0);
  kernel_operator(g);
  for (auto _ : state) benchmark::DoNotOptimize(bilinear_fast(u, v));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BilinearFast)->RangeMultiplier(2)->Range(16, 256)->Complexity();

static void BilinearDirect(benchmark::State& state) {
  const auto g = build_grid(GridKind::cartesian, 4.0, static_cast<int>(state.range(0)));
  const auto u = bump(g, 0.5, 1.5), v = bump(g, -0.5, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(bilinear_direct(u, v));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(BilinearDirect)->RangeMultiplier(2)->Range(16, 32)->Unit(benchmark::kMillisecond);

static void EnergyGradient(benchmark::State& state) {
  const auto g = build_grid(GridKind::cartesian, 4.0, static_cast<int>(state.range(0)));
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const auto u = bump(g, 0.0, 2.0).scaled(0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fn.gradient(u.values()));
  state.SetComplexityN(state.range(0) * state.range(0));
}
BENCHMARK(EnergyGradient)->RangeMultiplier(2)->Range(32, 256)->Complexity();

static void RadialEnergy(benchmark::State& state) {
  const auto g = build_grid(GridKind::radial, 8.0, static_cast<int>(state.range(0)));
  const EnergyFunctional fn(g, NonlinearitySpec::exp_minus_one(), {});
  const auto u = GridField::sample_radial(g, [](double r) { return 0.5 * std::exp(-r * r); });
  for (auto _ : state) benchmark::DoNotOptimize(fn.energy(u.values()));
}
BENCHMARK(RadialEnergy)->RangeMultiplier(2)->Range(256, 2048);

static void SolveSmall(benchmark::State& state) {
  SolverConfig c;
  c.domain_radius = 4.0;
  c.resolution = static_cast<int>(state.range(0));
  c.spec = NonlinearitySpec::exp_minus_one();
  for (auto _ : state) benchmark::DoNotOptimize(solve_mountain_pass(c).level);
}
BENCHMARK(SolveSmall)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
