#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"
#include "carbon/solver.hpp"

namespace carbon {

/// Snapshot of the Picard recursion for the stationary infinite-period
/// field: omega^0 = 0 and omega^n solves one period of length tau against
///   Phi^n(p, e) = omega^{n-1}(0, p, e - lambda) for e < lambda, 1 otherwise.
struct PicardState {
  int iteration = 0;
  /// omega^n; empty for n = 0.
  std::shared_ptr<const ValueGrid> current;
  /// residual[n-1] = sup_p sum_e |omega^n - omega^{n-1}|(0, p, e) de
  std::vector<double> residuals;
  /// ratio[n-2] = residual[n-1] / residual[n-2], n >= 2
  std::vector<double> ratios;
  /// min over nodes of omega^n - omega^{n-1} (all time slices), per iteration
  std::vector<double> min_increments;
  bool converged = false;
  double tol_l1 = 0.0;
  int max_iter = 0;
  std::vector<std::string> warnings;

  double last_residual() const { return residuals.empty() ? 0.0 : residuals.back(); }
};

struct PicardSettings {
  double tau = 1.0;
  double lambda = 1.0;
  /// 0 uses 1e-4 times the e-span of the grid.
  double tol_l1 = 0.0;
  /// 0 uses ceil(log(tol) / log(e^{-r tau})) + 10.
  int max_iter = 0;
};

/// Discrete uniqueness norm: sup over p of the e-integrated absolute
/// difference of two grids at slice index ti (both grids share axes).
double l1_distance(const ValueGrid& a, const ValueGrid& b, std::size_t ti = 0);

/// One Picard step. Requires r > 0 and lambda > 0.
PicardState picard_step(const PicardState& state, const CoefficientSet& coeffs,
                        const PicardSettings& settings, const SolverConfig& config);

struct StructuralCheck {
  bool drift_dominated = false;  // r - L_b >= beta > 0
  bool uniformly_elliptic = false;
  double drift_lipschitz = 0.0;
  double min_sigma = 0.0;
  bool holds() const { return drift_dominated || uniformly_elliptic; }
};

/// Sampled check of the structural assumptions on the p-grid.
StructuralCheck check_structure(const CoefficientSet& coeffs, const SolverConfig& config);

struct InfiniteSolution {
  std::shared_ptr<const ValueGrid> w;
  PicardState certificate;
  StructuralCheck structure;
  /// L1 distance between w and one extra solve against the terminal
  /// condition rebuilt from w itself.
  double self_consistency = 0.0;
};

/// Iterates picard_step until the residual drops to tol_l1 or max_iter is
/// reached (certificate.converged = false in that case), then runs the
/// stationarity re-solve.
InfiniteSolution solve_infinite(const CoefficientSet& coeffs, const PicardSettings& settings,
                                const SolverConfig& config);

struct LeftTail {
  /// sum_{e < 0} w(0, p, e) de, one entry per p-node
  std::vector<double> integral;
  /// contribution of the outermost `unit` of the tail, one entry per p-node
  std::vector<double> outermost_unit;
};

/// Left-tail L1 mass of w at t = 0. Throws ValidationError unless the grid
/// reaches at least `required_tail` below 0.
LeftTail l1_left_tail(const ValueGrid& w, double required_tail, double unit);

}  // namespace carbon
