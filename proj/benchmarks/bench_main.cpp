#include <cmath>

#include <benchmark/benchmark.h>

#include "carbon/infinite_period.hpp"
#include "carbon/montecarlo.hpp"
#include "carbon/multi_period.hpp"
#include "carbon/philox.hpp"
#include "carbon/solver.hpp"

using namespace carbon;

namespace {

SolverConfig grid_1d(int cells) {
  SolverConfig cfg;
  cfg.e_grid = {-1.5, 1.5, cells};
  return cfg;
}

void BM_NumericalFlux(benchmark::State& state) {
  const auto f = make_flux(presets::no_factor(1.0, 1.0, 0.0));
  const double u_min = f.minimizer(0.0);
  const double f_min = f(0.0, u_min);
  double u = 0.0;
  for (auto _ : state) {
    u += 1e-6;
    if (u > 1.0) u = 0.0;
    benchmark::DoNotOptimize(numerical_flux(FluxScheme::godunov, f(0.0, u), f(0.0, 1.0 - u), f_min, u, 1.0 - u, u_min));
  }
}
BENCHMARK(BM_NumericalFlux);

void BM_QuadratureFlux(benchmark::State& state) {
  CoefficientSet c;
  c.emissions_rate = [](double, double y) { return std::exp(-y) - y; };
  c.lipschitz = 2.0;
  const auto f = make_flux(c);
  double y = 0.0;
  for (auto _ : state) {
    y = y > 1.0 ? 0.0 : y + 1e-3;
    benchmark::DoNotOptimize(f(0.0, y));
  }
}
BENCHMARK(BM_QuadratureFlux);

void BM_SolveBurgers(benchmark::State& state) {
  const auto coeffs = presets::no_factor(0.0, 1.0, 0.0);
  const auto cfg = grid_1d(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_one_period(coeffs, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg));
}
BENCHMARK(BM_SolveBurgers)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

void BM_SolveFactor(benchmark::State& state) {
  const auto coeffs = presets::linear_abatement(1.0, 1.0, 1.0, 1.0, 0.5, 0.05);
  SolverConfig cfg;
  cfg.e_grid = {-2.0, 3.0, static_cast<int>(state.range(0))};
  cfg.p_grid = AxisSpec{-1.75, 1.75, 35};
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_one_period(coeffs, TerminalSurface::indicator(0.5), 0.0, 1.0, cfg));
}
BENCHMARK(BM_SolveFactor)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_SolveInfinite(benchmark::State& state) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.05);
  SolverConfig cfg;
  cfg.e_grid = {-4.0, 2.5, 400};
  for (auto _ : state) benchmark::DoNotOptimize(solve_infinite(coeffs, PicardSettings{}, cfg));
}
BENCHMARK(BM_SolveInfinite)->Unit(benchmark::kMillisecond);

void BM_PhiloxNormals(benchmark::State& state) {
  std::uint64_t step = 0;
  for (auto _ : state) benchmark::DoNotOptimize(normal_pair(42, 7, step++));
}
BENCHMARK(BM_PhiloxNormals);

void BM_SimulatePaths(benchmark::State& state) {
  const auto coeffs = presets::linear_abatement(1.0, 1.0, 1.0, 1.0, 0.5, 0.05);
  SolverConfig cfg;
  cfg.e_grid = {-1.0, 3.0, 200};
  cfg.p_grid = AxisSpec{-2.5, 2.5, 25};
  const auto field = solve_multi_period(MarketSpec::constant_caps(1, 1.0, 1.0, 0.05), coeffs, cfg);
  SimulationSettings s;
  s.n_paths = static_cast<std::uint64_t>(state.range(0));
  s.steps_per_period = 512;
  s.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(field, coeffs, s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SimulatePaths)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
