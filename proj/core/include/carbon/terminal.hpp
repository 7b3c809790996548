#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "carbon/cap.hpp"

namespace carbon {

/// Terminal condition phi(p, e) or, when parametrized, Phi(p, e, e_param).
///
/// A surface is a continuous part `below` plus an optional jump location
/// j(e_param): for e >= j(e_param) the value is 1. The split lets the solver
/// project indicator-type data onto cell averages exactly.
class TerminalSurface {
 public:
  using Fn = std::function<double(double p, double e, double e_param)>;
  using JumpFn = std::function<double(double e_param)>;
  enum class Representation { closed_form, grid_sampled };

  TerminalSurface(Fn below, JumpFn jump, double lipschitz_p, Representation rep,
                  bool parametrized, std::string label);

  /// 1_{e >= level}
  static TerminalSurface indicator(double level);
  /// theta(p, e, e_param) = 1_{e >= Lambda(e_param)}
  static TerminalSurface indicator(const CapFunction& cap);
  static TerminalSurface constant(double value);
  static TerminalSurface closed_form(std::function<double(double p, double e)> f,
                                     double lipschitz_p, std::string label);

  double operator()(double p, double e, double e_param = 0.0) const;
  /// Mean of the surface over [lo, hi] in e. Exact for the jump part;
  /// composite 4-point Gauss-Legendre on the continuous part.
  double cell_average(double p, double lo, double hi, double e_param = 0.0) const;

  /// phi(p, e - x, e_param)
  TerminalSurface shifted(double x) const;

  double lipschitz_p() const noexcept { return lipschitz_p_; }
  Representation representation() const noexcept { return rep_; }
  bool parametrized() const noexcept { return parametrized_; }
  bool has_jump() const noexcept { return static_cast<bool>(jump_); }
  double jump_location(double e_param) const { return jump_(e_param); }
  const Fn& continuous_part() const noexcept { return below_; }
  const std::string& label() const noexcept { return label_; }

 private:
  Fn below_;
  JumpFn jump_;
  double lipschitz_p_;
  Representation rep_;
  bool parametrized_;
  std::string label_;
};

struct TerminalCheckBox {
  double p_lo = 0.0;
  double p_hi = 0.0;
  int n_p = 1;
  double e_lo = -1.0;
  double e_hi = 1.0;
  int n_e = 201;
  /// e_param samples; ignored for non-parametrized surfaces.
  std::vector<double> e_params{0.0};
};

struct TerminalCheck {
  bool pass = true;
  std::size_t range_violations = 0;
  std::size_t monotonicity_violations = 0;
  /// max over (p, e_param) of phi at the left edge and of 1 - phi at the right edge
  double left_limit_residual = 0.0;
  double right_limit_residual = 0.0;
  double observed_lipschitz_p = 0.0;
  bool lipschitz_ok = true;
  /// Parametrized surfaces only: e_param -> Phi(p, e + e_param, e_param) must
  /// be non-decreasing for each fixed e.
  std::size_t diagonal_monotonicity_violations = 0;
  std::vector<std::string> notes;
};

/// Sampled membership check for the admissible terminal classes. Limits
/// are checked against `limit_tol` at the edges of the box.
TerminalCheck validate_terminal(const TerminalSurface& phi, const TerminalCheckBox& box,
                                double tol = 1e-12, double limit_tol = 1e-6);

}  // namespace carbon
