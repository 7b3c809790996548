#include <cmath>

#include <gtest/gtest.h>

#include "carbon/cap.hpp"
#include "carbon/coefficients.hpp"
#include "carbon/error.hpp"
#include "carbon/linking.hpp"
#include "carbon/market.hpp"
#include "carbon/multi_period.hpp"
#include "carbon/oracle.hpp"
#include "carbon/solver.hpp"
#include "carbon/terminal.hpp"

using namespace carbon;

namespace {

SolverConfig small_grid(double lo, double hi, int cells) {
  SolverConfig cfg;
  cfg.e_grid = {lo, hi, cells};
  return cfg;
}

}  // namespace

TEST(Coefficients, LinearRateHasUnitMonotonicityRatio) {
  const auto c = presets::no_factor(1.0, 1.0, 0.0);
  const auto report = validate_coefficients(c, {0.0, 0.0, 0.0, 1.0}, 11);
  EXPECT_TRUE(report.pass) << report.summary();
  EXPECT_NEAR(report.min_monotonicity_ratio, 1.0, 1e-12);
  EXPECT_NEAR(report.max_monotonicity_ratio, 1.0, 1e-12);
}

TEST(Coefficients, IncreasingRateIsRejected) {
  CoefficientSet c;
  c.emissions_rate = [](double, double y) { return y; };
  const auto report = validate_coefficients(c, {0.0, 0.0, 0.0, 1.0}, 11);
  EXPECT_FALSE(report.pass);
  ASSERT_FALSE(report.violations.empty());
  bool saw_monotonicity = false;
  for (const auto& v : report.violations)
    saw_monotonicity |= v.kind != CoefficientViolation::Kind::lipschitz;
  EXPECT_TRUE(saw_monotonicity);
}

TEST(Coefficients, FactorModelWithDeclaredConstantsPasses) {
  CoefficientSet c;
  c.dim_p = 1;
  c.emissions_rate = [](double p, double y) { return p - 2.0 * y; };
  c.drift = [](double p) { return -p; };
  c.vol = [](double) { return 0.5; };
  c.lipschitz = 2.0;
  c.mono_l1 = 2.0;
  c.mono_l2 = 2.0;
  const auto report = validate_coefficients(c, {-1.0, 1.0, 0.0, 1.0}, 9);
  EXPECT_TRUE(report.pass) << report.summary();
  // exhaustive lattice evaluation: the worst Lipschitz quotient is attained at dp = 0
  EXPECT_NEAR(report.max_lipschitz_ratio, 2.0, 1e-12);
  EXPECT_NEAR(report.min_monotonicity_ratio, 2.0, 1e-12);
}

TEST(Coefficients, NonFiniteRateThrows) {
  CoefficientSet c;
  c.emissions_rate = [](double, double y) { return std::log(y) - y; };
  EXPECT_THROW(validate_coefficients(c, {0.0, 0.0, 0.0, 1.0}, 5), ValidationError);
}

TEST(Coefficients, InconsistentConstantsAreRejected) {
  auto c = presets::no_factor(1.0, 1.0, 0.0);
  c.mono_l1 = 2.0;
  c.mono_l2 = 1.0;
  EXPECT_THROW(c.check_constants(), ValidationError);
}

TEST(Caps, BankingBorrowingWithdrawalSumsNextAllocation) {
  const std::vector<double> c{100, 100, 100};
  const auto cap = make_cap_allocation(c, 1, 3, AllocationMode::banking_borrowing_withdrawal);
  EXPECT_DOUBLE_EQ(cap(0.0), 200.0);
  EXPECT_DOUBLE_EQ(cap(57.0), 200.0);
  EXPECT_TRUE(cap.is_constant());
}

TEST(Caps, LastPeriodUsesEveryAllocation) {
  const std::vector<double> c{100, 100, 100};
  for (auto mode : {AllocationMode::banking_borrowing_withdrawal, AllocationMode::banking_withdrawal})
    EXPECT_DOUBLE_EQ(make_cap_allocation(c, 3, 3, mode)(12.0), 300.0);
}

TEST(Caps, BankingWithdrawalStopsAtCurrentPeriod) {
  EXPECT_DOUBLE_EQ(make_cap_allocation({50, 70}, 1, 2, AllocationMode::banking_withdrawal)(3.0), 50.0);
}

TEST(Caps, AllocationLengthMismatchThrows) {
  EXPECT_THROW(make_cap_allocation({50}, 1, 2, AllocationMode::banking_borrowing_withdrawal),
               ValidationError);
  EXPECT_THROW(make_cap_allocation({50, 70}, 3, 2, AllocationMode::banking_withdrawal), ValidationError);
}

TEST(Caps, AllocationCapIsExactlyConstant) {
  const auto cap = make_cap_allocation({1.5, 2.5, 0.5}, 2, 3, AllocationMode::banking_borrowing_withdrawal);
  for (double x = -10.0; x <= 10.0; x += 0.37) EXPECT_EQ(cap(x), 4.5);
}

TEST(Caps, MsrBranches) {
  MsrParameters m{100, 100, 30, 120, 20, 0.88};
  const auto cap = make_cap_msr(m);
  EXPECT_DOUBLE_EQ(cap(90.0), 200.0);
  EXPECT_DOUBLE_EQ(cap(180.0), 220.0);
  EXPECT_DOUBLE_EQ(cap(50.0), 182.0);
  EXPECT_EQ(cap.kind(), CapKind::msr);
  EXPECT_FALSE(cap.is_constant());
}

TEST(Caps, MsrParameterOrderingIsChecked) {
  EXPECT_THROW(make_cap_msr({100, 100, 120, 30, 20, 0.5}), ValidationError);
  EXPECT_THROW(make_cap_msr({100, 100, 30, 120, 0.0, 0.5}), ValidationError);
  EXPECT_THROW(make_cap_msr({100, 100, 30, 120, 20, 1.0}), ValidationError);
}

TEST(Caps, MsrMayLeaveThetaWithWarning) {
  const auto cap = make_cap_msr({100, 100, 30, 120, 20, 0.88});
  const auto check = validate_cap(cap, 0.0, 300.0, 601, -50.0);
  EXPECT_FALSE(check.in_theta);
  EXPECT_GT(check.max_increase, 0.0);
  EXPECT_FALSE(check.warnings.empty());
}

TEST(Caps, ConstantCapIsInTheta) {
  const auto check = validate_cap(CapFunction::constant(2.0), -5.0, 10.0, 101, -5.0);
  EXPECT_TRUE(check.in_theta);
  EXPECT_DOUBLE_EQ(check.gamma_at_right_edge, -8.0);
}

TEST(Terminal, IndicatorSatisfiesClassK) {
  const auto phi = TerminalSurface::indicator(0.25);
  const auto check = validate_terminal(phi, {});
  EXPECT_TRUE(check.pass);
  EXPECT_EQ(phi(0.0, 0.25), 1.0);
  EXPECT_EQ(phi(0.0, 0.2499), 0.0);
}

TEST(Terminal, CellAverageOfIndicatorIsExact) {
  const auto phi = TerminalSurface::indicator(0.0);
  EXPECT_DOUBLE_EQ(phi.cell_average(0.0, -0.25, 0.75), 0.75);
  EXPECT_DOUBLE_EQ(phi.cell_average(0.0, 0.5, 0.75), 1.0);
}

TEST(Terminal, DecreasingSurfaceFailsMonotonicity) {
  const auto phi = TerminalSurface::closed_form([](double, double e) { return e < 0 ? 1.0 : 0.0; }, 0.0, "bad");
  const auto check = validate_terminal(phi, {});
  EXPECT_FALSE(check.pass);
  EXPECT_GT(check.monotonicity_violations, 0u);
}

TEST(Terminal, ParametrizedThetaIsInKHat) {
  const auto phi = TerminalSurface::indicator(make_cap_msr({1, 1, 0.6, 1.4, 0.3, 0.7}));
  TerminalCheckBox box;
  box.e_lo = -3.0;
  box.e_hi = 6.0;
  box.e_params = {0.0, 0.5, 1.0, 1.5};
  const auto check = validate_terminal(phi, box);
  EXPECT_EQ(check.range_violations, 0u);
  EXPECT_EQ(check.monotonicity_violations, 0u);
}

TEST(Market, ConstantCapsFollowPeriodIndex) {
  const auto spec = MarketSpec::constant_caps(3, 1.0, 0.5, 0.05);
  ASSERT_EQ(spec.num_periods(), 3);
  EXPECT_DOUBLE_EQ(spec.cap(2)(0.0), 1.0);
  EXPECT_DOUBLE_EQ(spec.period_start(3), 2.0);
  EXPECT_TRUE(spec.all_caps_constant());
  EXPECT_EQ(spec.final_condition()(0.0, 1.5), 1.0);
  EXPECT_EQ(spec.final_condition()(0.0, 1.49), 0.0);
}

TEST(Market, PenaltyOtherThanOneIsRejected) {
  auto spec = MarketSpec::constant_caps(1, 1.0, 1.0, 0.0);
  spec.penalty = 2.0;
  EXPECT_THROW(spec.check(), ValidationError);
}

TEST(Market, PeriodEndsMustIncrease) {
  EXPECT_THROW(MarketSpec::finite({1.0, 1.0}, {CapFunction::constant(1), CapFunction::constant(2)}, 0.0).check(),
               ValidationError);
}

TEST(Linking, ZeroContinuationGivesIndicator) {
  const auto cfg = small_grid(-1.0, 3.0, 40);
  const auto zero = solve_one_period(presets::no_factor(1.0, 1.0, 0.0), TerminalSurface::constant(0.0), 0.0,
                                     1.0, cfg);
  const auto psi = link_terminal(zero, CapFunction::constant(2.0));
  EXPECT_EQ(psi(0.0, 1.9), 0.0);
  EXPECT_EQ(psi(0.0, 2.0), 1.0);
  EXPECT_EQ(psi(0.0, -5.0), 0.0);
}

TEST(Linking, DiscountedConstantBelowCap) {
  const auto cfg = small_grid(-1.0, 3.0, 40);
  const auto one = solve_one_period(presets::no_factor(1.0, 1.0, 0.05), TerminalSurface::constant(1.0), 0.0,
                                    1.0, cfg);
  const auto psi = link_terminal(one, CapFunction::constant(2.0));
  EXPECT_NEAR(psi(0.0, 0.5), 0.951229424500714, 1e-12);
  EXPECT_NEAR(psi(0.0, 1.99), 0.951229424500714, 1e-12);
  EXPECT_EQ(psi(0.0, 2.0), 1.0);
  EXPECT_EQ(psi(0.0, 2.7), 1.0);
}

TEST(Linking, BurgersContinuationMatchesRarefaction) {
  const auto coeffs = presets::no_factor(0.0, 1.0, 0.0);
  const auto v = solve_one_period(coeffs, TerminalSurface::indicator(0.0), 0.0, 1.0, small_grid(-1.5, 1.5, 400));
  const auto psi = link_terminal(v, CapFunction::constant(0.8));
  const auto exact = burgers_rarefaction(0.0, 0.0, 1.0);
  for (double e = -1.0; e < 0.8; e += 0.05) EXPECT_NEAR(psi(0.0, e), exact(0.0, 0.0, e), 0.03) << e;
  EXPECT_EQ(psi(0.0, 0.8), 1.0);
}

TEST(Linking, ParametrizedNextPeriodNeedsCoveredDiagonal) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.0);
  const Axis params = Axis::uniform(0.0, 1.0, 11);
  const auto v = solve_one_period(coeffs, TerminalSurface::indicator(make_cap_msr({1, 1, 0.6, 1.4, 0.3, 0.7})), 0.0,
                                  1.0, small_grid(-1.0, 4.0, 50), params);
  const auto cap = CapFunction::constant(1.0);
  EXPECT_THROW(link_terminal(v, cap), ValidationError);
  EXPECT_THROW(link_terminal(v, cap, DiagonalRange{-0.5, 1.0}), ValidationError);
  EXPECT_NO_THROW(link_terminal(v, cap, DiagonalRange{0.0, 1.0}));
}

TEST(Linking, LinkedSurfaceFromSolveIsMonotoneAndOneAboveCap) {
  const auto coeffs = presets::no_factor(1.0, 1.0, 0.05);
  const auto v = solve_one_period(coeffs, TerminalSurface::indicator(2.0), 0.0, 1.0, small_grid(-1.0, 4.0, 100));
  const auto psi = link_terminal(v, CapFunction::constant(1.0));
  TerminalCheckBox box;
  box.e_lo = -2.0;
  box.e_hi = 5.0;
  box.n_e = 701;
  const auto check = validate_terminal(psi, box);
  EXPECT_EQ(check.monotonicity_violations, 0u);
  EXPECT_EQ(check.range_violations, 0u);
  for (double e = 1.0; e < 5.0; e += 0.1) EXPECT_EQ(psi(0.0, e), 1.0);
}
