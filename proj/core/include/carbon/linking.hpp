#pragma once

#include <optional>
#include <utility>

#include "carbon/cap.hpp"
#include "carbon/grid.hpp"
#include "carbon/terminal.hpp"

namespace carbon {

/// Interval of e_param values on which the diagonal e = e_param of the next
/// period must be resolvable (typically the reachable compliance readings).
struct DiagonalRange {
  double lo;
  double hi;
};

/// Terminal condition linking a period to its successor:
///   psi(p, e, e_param) = v_next(start, p, e, e)   if e < Lambda(e_param)
///                      = 1                        otherwise.
/// The diagonal is read with piecewise-multilinear interpolation across the
/// e_param axis of v_next (clamped to that axis outside `needed`). Below the
/// e-grid of v_next the continuation value is 0, its left limit.
///
/// Throws ValidationError when the e_param axis of v_next does not cover
/// `needed`, or when v_next has an e_param axis but `needed` is absent.
TerminalSurface link_terminal(const GridSlice& v_next_start, const CapFunction& cap,
                              std::optional<DiagonalRange> needed = std::nullopt);
TerminalSurface link_terminal(const ValueGrid& v_next, const CapFunction& cap,
                              std::optional<DiagonalRange> needed = std::nullopt);

/// Picard terminal condition for the stationary infinite-period market:
///   Phi(p, e) = w_start(p, e - lambda)   if e < lambda
///             = 1                        otherwise,
/// with w_start taken as 0 below its e-grid.
TerminalSurface shifted_continuation(const GridSlice& w_start, double lambda);

/// Largest |d_p v| difference quotient on a slice (0 without a factor axis).
double lipschitz_in_p(const GridSlice& slice);

}  // namespace carbon
