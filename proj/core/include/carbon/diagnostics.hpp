#pragma once

#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"

namespace carbon {

struct SliceDiagnostics {
  double t = 0.0;
  /// max_i (v_{i+1} - v_i) / de over every (p, e_param) row
  double max_e_quotient = 0.0;
  /// 1 / (l1 (tau - t)); +inf on the terminal slice
  double e_lipschitz_bound = 0.0;
  double left_boundary_value = 0.0;
  /// max |v(t, p, e_last) - e^{-r (tau - t)}|
  double right_limit_residual = 0.0;
  /// sup over p of sum_{e < 0} v de
  double left_tail_integral = 0.0;
};

struct DiagnosticsReport {
  std::vector<SliceDiagnostics> slices;
  /// Decreasing e-steps over all slices, terminal slice included.
  std::size_t monotonicity_violations = 0;
  /// Decreasing e-steps in the terminal slice alone. The scheme can only
  /// preserve monotone data, so e-monotonicity is asserted only when this is 0.
  std::size_t terminal_monotonicity_violations = 0;
  std::size_t range_violations = 0;
  /// Interior slices with t <= tau - lipschitz_horizon whose quotient exceeds
  /// (1 + lipschitz_slack) times the bound.
  std::size_t lipschitz_violations = 0;
  double worst_lipschitz_ratio = 0.0;

  bool monotonicity_asserted() const { return terminal_monotonicity_violations == 0; }
  bool hard_invariants_pass() const {
    return range_violations == 0 && (!monotonicity_asserted() || monotonicity_violations == 0);
  }
  bool pass() const { return hard_invariants_pass() && lipschitz_violations == 0; }
  std::string summary() const;
};

struct DiagnosticsOptions {
  double tol = 1e-12;
  double lipschitz_slack = 0.05;
  double lipschitz_horizon = 0.1;
};

/// Structural checks of a solved period: e-Lipschitz bound, monotonicity in
/// e, the range [0, e^{-r (tau - t)}], boundary limits and the left-tail L1
/// mass.
DiagnosticsReport diagnostics(const ValueGrid& grid, const CoefficientSet& coeffs,
                              const DiagnosticsOptions& options = {});

/// Z ~ d_p v * sigma(p) by central differences (one-sided at the edges) on
/// time slice ti; one value per (p, e) node, e_param slice qi.
std::vector<double> z_estimate(const ValueGrid& grid, const CoefficientSet& coeffs,
                               std::size_t ti, std::size_t qi = 0);

}  // namespace carbon
