#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"
#include "carbon/terminal.hpp"

namespace carbon {

enum class FluxScheme { godunov, engquist_osher };

std::string to_string(FluxScheme scheme);
FluxScheme flux_scheme_from_string(const std::string& s);

struct AxisSpec {
  double min = 0.0;
  double max = 1.0;
  int n_cells = 100;
};

struct SolverConfig {
  /// e is discretised by n_cells finite volumes on [min, max].
  AxisSpec e_grid{-1.5, 1.5, 400};
  /// p is discretised by n_cells + 1 nodes on [min, max]; required for dim_p = 1.
  std::optional<AxisSpec> p_grid;
  /// 0 derives the step count from cfl. A positive value is raised when it
  /// would break the stability bound.
  int n_steps = 0;
  double cfl = 0.9;
  /// Artificial noise standard deviation epsilon (adds eps^2/2 Laplacian in e and p).
  double viscosity = 0.0;
  /// Terminal smoothing length delta in e; 0 keeps the sharp data.
  double mollify_width = 0.0;
  FluxScheme flux = FluxScheme::godunov;
  /// Upper bound on stored time slices (terminal and last interior slice are always kept).
  int max_slices = 257;
  int max_steps = 2'000'000;
  int threads = 0;

  void check() const;
  /// Stable textual form used for config hashing.
  std::string fingerprint() const;
};

/// f(p, y) = -M(p, y) with M(p, y) = int_0^y mu(p, u) du, the flux of the
/// backward-time conservation law. Convex in y whenever mu is strictly
/// decreasing in y.
class FluxFunction {
 public:
  explicit FluxFunction(const CoefficientSet& coeffs, double quad_tol = 1e-10);

  double operator()(double p, double y) const;
  /// f'(p, y) = -mu(p, y)
  double speed(double p, double y) const { return -coeffs_.mu(p, y); }
  /// argmin of f(p, .) clamped to [0, 1].
  double minimizer(double p) const;

 private:
  CoefficientSet coeffs_;
  double quad_tol_;
};

FluxFunction make_flux(const CoefficientSet& coeffs);

/// Monotone numerical flux for convex f on one p-row.
double numerical_flux(FluxScheme scheme, double f_left, double f_right, double f_min,
                      double u_left, double u_right, double u_min);

/// phi convolved in e with a compactly supported C-infinity bump of total
/// width delta (support [-delta/2, delta/2]). delta = 0 returns phi.
TerminalSurface mollify_terminal(const TerminalSurface& phi, double delta);

struct SolveInfo {
  int n_steps = 0;
  double dt = 0.0;
  bool steps_adjusted = false;
  double max_speed = 0.0;
  double diffusion_rate = 0.0;
};

/// Solves the one-period terminal-value problem
///   d_t u + mu(p, u) d_e u + L_p u + eps^2/2 (d_ee u + d_pp u) = r u,  u(tau) = phi
/// backward from tau to t0 with an explicit monotone finite-volume scheme in
/// the backward time s = tau - t. Parametrized terminal data is solved
/// slice by slice over `e_param`.
ValueGrid solve_one_period(const CoefficientSet& coeffs, const TerminalSurface& phi, double t0,
                           double tau, const SolverConfig& config,
                           const std::optional<Axis>& e_param = std::nullopt,
                           SolveInfo* info = nullptr);

/// Largest |mu| over y in [0, 1] and the p-grid of `config`.
double max_abs_rate(const CoefficientSet& coeffs, const SolverConfig& config);

/// e-grid [cap - m, cap + m] with m = 1.5 (tau - t0) max|mu|, keeping cell count.
AxisSpec auto_e_grid(const CoefficientSet& coeffs, const SolverConfig& config, double cap_lo,
                     double cap_hi, double horizon, int n_cells);

/// Checks that [cap_lo, cap_hi] keeps sup|mu| * horizon of room on both sides.
void check_domain_of_dependence(const CoefficientSet& coeffs, const SolverConfig& config,
                                double cap_lo, double cap_hi, double horizon);

}  // namespace carbon
