#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "carbon/diagnostics.hpp"
#include "carbon/error.hpp"
#include "carbon/infinite_period.hpp"
#include "carbon/oracle.hpp"
#include "carbon/solver.hpp"

using namespace carbon;

namespace {

SolverConfig grid_1d(double lo, double hi, int cells) {
  SolverConfig cfg;
  cfg.e_grid = {lo, hi, cells};
  return cfg;
}

SolverConfig grid_2d(double lo, double hi, int cells, int p_cells) {
  auto cfg = grid_1d(lo, hi, cells);
  cfg.p_grid = AxisSpec{-1.5, 1.5, p_cells};
  return cfg;
}

const CoefficientSet kBurgers = presets::no_factor(0.0, 1.0, 0.0);

double max_abs_diff(const ValueGrid& a, const ValueGrid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

}  // namespace

TEST(Flux, QuadraticAntiderivatives) {
  const auto f = make_flux(presets::no_factor(1.0, 1.0, 0.0));
  EXPECT_NEAR(f(0.0, 1.0), -0.5, 1e-14);
  EXPECT_EQ(f(0.0, 0.0), 0.0);
  const auto g = make_flux(kBurgers);
  EXPECT_NEAR(g(0.0, 2.0), 2.0, 1e-14);
}

TEST(Flux, QuadratureFallbackMatchesClosedForm) {
  CoefficientSet c;
  c.emissions_rate = [](double, double y) { return std::exp(-y) - y; };
  c.lipschitz = 2.0;
  const auto f = make_flux(c);
  const double exact = -((1.0 - std::exp(-0.7)) - 0.245);
  EXPECT_NEAR(f(0.0, 0.7), exact, 1e-10);
  EXPECT_EQ(f(0.0, 0.0), 0.0);
}

TEST(Flux, MinimizerIsRootOfRate) {
  EXPECT_NEAR(make_flux(presets::no_factor(0.3, 1.0, 0.0)).minimizer(0.0), 0.3, 1e-12);
  EXPECT_NEAR(make_flux(presets::no_factor(2.0, 1.0, 0.0)).minimizer(0.0), 1.0, 1e-12);
}

TEST(Flux, GodunovAndEngquistOsherAgreeWithoutSonicPoint) {
  const auto f = [](double u) { return 0.5 * u * u; };
  for (auto [a, b] : {std::pair{0.2, 0.7}, std::pair{0.9, 0.3}}) {
    EXPECT_DOUBLE_EQ(numerical_flux(FluxScheme::godunov, f(a), f(b), 0.0, a, b, 0.0),
                     numerical_flux(FluxScheme::engquist_osher, f(a), f(b), 0.0, a, b, 0.0));
  }
  EXPECT_EQ(numerical_flux(FluxScheme::godunov, f(-0.5), f(0.5), 0.0, -0.5, 0.5, 0.0), 0.0);
}

TEST(Mollify, ZeroWidthIsIdentity) {
  const auto phi = TerminalSurface::indicator(0.0);
  const auto m = mollify_terminal(phi, 0.0);
  for (double e = -1.0; e <= 1.0; e += 0.125) EXPECT_EQ(m(0.0, e), phi(0.0, e));
}

TEST(Mollify, IndicatorSmoothedInsideSupport) {
  const auto m = mollify_terminal(TerminalSurface::indicator(0.0), 0.4);
  EXPECT_EQ(m(0.0, -0.2), 0.0);
  EXPECT_EQ(m(0.0, -0.5), 0.0);
  EXPECT_NEAR(m(0.0, 0.2), 1.0, 1e-12);
  EXPECT_NEAR(m(0.0, 0.0), 0.5, 1e-9);
  double prev = 0.0;
  for (double e = -0.25; e <= 0.25; e += 0.01) {
    const double v = m(0.0, e);
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(Mollify, SmoothSurfaceStaysInRange) {
  const auto phi = TerminalSurface::closed_form([](double, double e) { return 0.5 * (1.0 + std::tanh(e)); }, 0.0,
                                                "tanh");
  const auto m = mollify_terminal(phi, 0.5);
  for (double e = -4.0; e <= 4.0; e += 0.1) {
    EXPECT_GE(m(0.0, e), 0.0);
    EXPECT_LE(m(0.0, e), 1.0);
  }
}

TEST(Solver, ZeroTerminalGivesZeroField) {
  const auto v = solve_one_period(presets::no_factor(1.0, 1.0, 0.05), TerminalSurface::constant(0.0), 0.0, 1.0,
                                  grid_1d(-2.0, 2.0, 80));
  for (double x : v.values()) EXPECT_EQ(x, 0.0);
}

TEST(Solver, ConstantTerminalIsDiscountedExactly) {
  const auto v = solve_one_period(presets::linear_abatement(1.0, 1.0, 1.0, 1.0, 0.5, 0.05),
                                  TerminalSurface::constant(1.0), 0.0, 1.0, grid_2d(-2.0, 2.0, 80, 12));
  for (std::size_t pi = 0; pi < v.np(); ++pi)
    for (std::size_t ei = 0; ei < v.ne(); ++ei) EXPECT_NEAR(v.at(0, pi, ei), std::exp(-0.05), 1e-12);
}

TEST(Solver, BurgersRarefactionAtCoarseResolution) {
  const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, grid_1d(-1.5, 1.5, 400));
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.5), 0.5, 0.02);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.25), 0.25, 0.02);
  EXPECT_EQ(v.evaluate(0.0, 0.0, -0.5), 0.0);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 1.3), 1.0, 1e-12);
}

TEST(Solver, AgreesWithIndependentNumpyGodunov) {
  // Frozen from tests/oracles/burgers_godunov.py (4000 cells, CFL 0.9).
  SolverConfig cfg = grid_1d(-1.5, 1.5, 4000);
  const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.25), 0.251505, 2e-6);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.5), 0.500263, 2e-6);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.75), 0.748937, 2e-6);
}

TEST(Solver, StepCountIsRaisedToMeetCfl) {
  SolverConfig cfg = grid_1d(-1.5, 1.5, 100);
  cfg.n_steps = 3;
  SolveInfo info;
  solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg, std::nullopt, &info);
  EXPECT_TRUE(info.steps_adjusted);
  EXPECT_LE(info.dt * info.max_speed / 0.03, 0.9 + 1e-12);
}

TEST(Solver, RejectsEmptyInterval) {
  EXPECT_THROW(solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 1.0, 1.0, grid_1d(-1, 1, 10)), Error);
}

TEST(Solver, ComparisonPrinciple) {
  const auto coeffs = presets::linear_abatement(1.0, 1.0, 1.0, 1.0, 0.5, 0.05);
  const auto cfg = grid_2d(-2.5, 3.5, 120, 12);
  const auto lo = solve_one_period(coeffs, TerminalSurface::indicator(0.6), 0.0, 1.0, cfg);
  const auto hi = solve_one_period(coeffs, TerminalSurface::indicator(0.3), 0.0, 1.0, cfg);
  for (std::size_t i = 0; i < lo.values().size(); ++i) EXPECT_LE(lo.values()[i], hi.values()[i] + 1e-12);
}

TEST(Solver, TranslationEquivariance) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.05);
  const double x = 0.25;
  const auto base = solve_one_period(coeffs, TerminalSurface::indicator(0.5), 0.0, 1.0, grid_1d(-2.0, 3.0, 200));
  const auto moved = solve_one_period(coeffs, TerminalSurface::indicator(0.5).shifted(x), 0.0, 1.0,
                                      grid_1d(-2.0 + x, 3.0 + x, 200));
  EXPECT_LE(max_abs_diff(base, moved), 1e-12);
}

TEST(Solver, TimeInvariance) {
  const auto coeffs = presets::linear_abatement(1.0, 1.0, 1.0, 1.0, 0.5, 0.05);
  const auto cfg = grid_2d(-2.5, 3.5, 60, 8);
  const auto a = solve_one_period(coeffs, TerminalSurface::indicator(0.5), 0.0, 1.0, cfg);
  const auto b = solve_one_period(coeffs, TerminalSurface::indicator(0.5), 0.5, 1.5, cfg);
  ASSERT_EQ(a.nt(), b.nt());
  EXPECT_EQ(max_abs_diff(a, b), 0.0);
  EXPECT_DOUBLE_EQ(b.t_axis()[0], 0.5);
}

TEST(Solver, L1ContractionWithoutFactor) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.05);
  const auto cfg = grid_1d(-2.0, 3.0, 250);
  const auto a = solve_one_period(coeffs, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg);
  const auto b = solve_one_period(coeffs, TerminalSurface::indicator(0.2), 0.0, 1.0, cfg);
  const double terminal = l1_distance(a, b, a.nt() - 1);
  EXPECT_NEAR(terminal, 0.2, 1e-12);
  EXPECT_LE(l1_distance(a, b, 0), std::exp(-0.05) * terminal * 1.05);
}

TEST(Solver, ParametrizedSolveMatchesSliceBySlice) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.0);
  const auto cap = make_cap_msr({1, 1, 0.6, 1.4, 0.3, 0.7});
  const Axis params = Axis::uniform(0.0, 1.0, 3);
  const auto cfg = grid_1d(-1.0, 4.0, 50);
  const auto v = solve_one_period(coeffs, TerminalSurface::indicator(cap), 0.0, 1.0, cfg, params);
  for (std::size_t qi = 0; qi < params.size(); ++qi) {
    const auto single = solve_one_period(coeffs, TerminalSurface::indicator(cap(params[qi])), 0.0, 1.0, cfg);
    for (std::size_t ei = 0; ei < v.ne(); ++ei) EXPECT_EQ(v.at(0, 0, ei, qi), single.at(0, 0, ei));
  }
}

TEST(Solver, ViscosityMovesTowardInviscidSolution) {
  auto cfg = grid_1d(-1.5, 1.5, 200);
  const auto inviscid = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg);
  double prev = 1e9;
  for (double eps : {0.1, 0.05, 0.025}) {
    cfg.viscosity = eps;
    const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, cfg);
    const double d = l1_distance(v, inviscid, 0);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Evaluate, ExactAtNodesAndLinearBetween) {
  const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, grid_1d(-1.5, 1.5, 60));
  const auto& e = v.e_axis();
  EXPECT_EQ(v.evaluate(0.0, 0.0, e[31]), v.at(0, 0, 31));
  const double mid = 0.5 * (e[31] + e[32]);
  EXPECT_NEAR(v.evaluate(0.0, 0.0, mid), 0.5 * (v.at(0, 0, 31) + v.at(0, 0, 32)), 1e-14);
  EXPECT_THROW(v.evaluate(0.0, 0.0, 2.0), GridBoundsError);
}

TEST(Evaluate, BurgersQuarterPoint) {
  const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, grid_1d(-1.5, 1.5, 400));
  EXPECT_NEAR(v.evaluate(0.0, 0.0, 0.25), 0.25, 0.02);
}

TEST(Diagnostics, ConstantFieldHasNoViolations) {
  const auto v = solve_one_period(presets::no_factor(1.0, 1.0, 0.05), TerminalSurface::constant(1.0), 0.0, 1.0,
                                  grid_1d(-2.0, 2.0, 80));
  const auto d = diagnostics(v, presets::no_factor(1.0, 1.0, 0.05));
  EXPECT_TRUE(d.pass()) << d.summary();
  for (const auto& s : d.slices) EXPECT_LE(s.max_e_quotient, 1e-12);
}

TEST(Diagnostics, ZeroFieldHasNoLeftTail) {
  const auto v = solve_one_period(presets::no_factor(1.0, 1.0, 0.0), TerminalSurface::constant(0.0), 0.0, 1.0,
                                  grid_1d(-2.0, 2.0, 80));
  for (const auto& s : diagnostics(v, presets::no_factor(1.0, 1.0, 0.0)).slices)
    EXPECT_EQ(s.left_tail_integral, 0.0);
}

TEST(Diagnostics, BurgersSlopeAtInitialTime) {
  const auto v = solve_one_period(kBurgers, TerminalSurface::indicator(0.0), 0.0, 1.0, grid_1d(-1.5, 1.5, 400));
  const auto d = diagnostics(v, kBurgers);
  EXPECT_EQ(d.range_violations, 0u);
  EXPECT_EQ(d.monotonicity_violations, 0u);
  ASSERT_FALSE(d.slices.empty());
  EXPECT_DOUBLE_EQ(d.slices.front().e_lipschitz_bound, 1.0);
  // The exact fan has slope 1. Godunov overshoots it in the first cell at the
  // sonic foot e = 0; the numpy reference (tests/oracles) shows the same
  // quotient, 1.9121554 at 400 cells.
  EXPECT_NEAR(d.slices.front().max_e_quotient, 1.9121554388349, 1e-9);
  const auto& e = v.e_axis();
  double interior = 0.0;
  for (std::size_t i = 0; i + 1 < v.ne(); ++i)
    if (e[i] > 0.05 && e[i] < 0.95) interior = std::max(interior, (v.at(0, 0, i + 1) - v.at(0, 0, i)) / v.de());
  EXPECT_LE(interior, 1.05);
}

TEST(Diagnostics, ZEstimateVanishesWithoutFactorDependence) {
  const auto coeffs = presets::linear_abatement(1.0, 0.0, 1.0, 1.0, 0.5, 0.0);
  const auto v = solve_one_period(coeffs, TerminalSurface::indicator(0.5), 0.0, 1.0, grid_2d(-2.0, 3.0, 50, 6));
  for (double z : z_estimate(v, coeffs, 0)) EXPECT_NEAR(z, 0.0, 1e-12);
}
