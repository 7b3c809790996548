#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"
#include "carbon/solver.hpp"
#include "carbon/terminal.hpp"

namespace carbon {

/// Independent reference solution y(t, p, e) for acceptance testing.
struct ReferenceSolution {
  enum class Kind { closed_form_rarefaction, fine_grid };

  Kind kind = Kind::closed_form_rarefaction;
  double t_lo = 0.0;
  double t_hi = 1.0;
  double e_lo = 0.0;
  double e_hi = 0.0;
  std::function<double(double t, double p, double e)> evaluate;
  /// Formula text or the config hash of the fine-grid run.
  std::string provenance;
  /// Fine grid only: L1 distance between the run and the half-resolution run.
  double self_convergence = 0.0;
  /// Fine grid only: the underlying field.
  std::shared_ptr<const ValueGrid> grid;

  double operator()(double t, double p, double e) const { return evaluate(t, p, e); }
};

std::string to_string(ReferenceSolution::Kind kind);

/// Entropy solution for mu(y) = c - y, d = 0, r = 0 and terminal 1_{e >= Lambda}:
///   v(t, e) = clamp((e - Lambda + c (tau - t)) / (tau - t), 0, 1),  t < tau.
/// Throws ValidationError for r != 0.
ReferenceSolution burgers_rarefaction(double c, double level, double tau, double r = 0.0);

struct FineGridProblem {
  CoefficientSet coeffs;
  TerminalSurface terminal = TerminalSurface::indicator(0.0);
  double t0 = 0.0;
  double tau = 1.0;
  SolverConfig base;
};

/// Solves at refine_factor times the base e resolution (and p resolution
/// when present) without viscosity, plus a half-resolution run for the
/// self-convergence estimate. Throws ValidationError when refine_factor < 8
/// or when the fine run would exceed max_cell_steps cell updates.
ReferenceSolution fine_grid_reference(const FineGridProblem& problem, int refine_factor,
                                      double max_cell_steps = 5e9);

/// Cell-averaged L1 distance at stored slice time t over the e-cells of the
/// grid that lie inside the reference domain; sup over p nodes.
double compare_l1(const ValueGrid& grid, const ReferenceSolution& ref, double t);

/// Largest pointwise difference at the grid cell centres at time t.
double compare_sup(const ValueGrid& grid, const ReferenceSolution& ref, double t);

/// Samples a reference onto a grid container with the given axes.
ValueGrid sample_reference(const ReferenceSolution& ref, const Axis& t, const Axis& p,
                           const Axis& e, GridMetadata meta);

}  // namespace carbon
