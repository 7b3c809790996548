#include "carbon/linking.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

namespace {

/// Continuation value read from a detached start slice: 0 below the e-grid,
/// the outermost value above it.
double continuation(const GridSlice& s, double p, double e, double e_param) {
  const auto& ax = s.e_axis();
  if (e < ax.front()) return 0.0;
  e = std::min(e, ax.back());
  if (s.has_param()) e_param = std::clamp(e_param, s.e_param_axis().front(), s.e_param_axis().back());
  if (s.has_factor()) p = std::clamp(p, s.p_axis().front(), s.p_axis().back());
  return s.evaluate(p, e, e_param);
}

}  // namespace

double lipschitz_in_p(const GridSlice& slice) {
  if (!slice.has_factor()) return 0.0;
  double best = 0.0;
  for (std::size_t pi = 0; pi + 1 < slice.np(); ++pi) {
    const double dp = slice.p_axis()[pi + 1] - slice.p_axis()[pi];
    for (std::size_t ei = 0; ei < slice.ne(); ++ei)
      for (std::size_t qi = 0; qi < slice.nq(); ++qi)
        best = std::max(best, std::abs(slice.at(pi + 1, ei, qi) - slice.at(pi, ei, qi)) / dp);
  }
  return best;
}

TerminalSurface link_terminal(const GridSlice& v_next_start, const CapFunction& cap,
                              std::optional<DiagonalRange> needed) {
  if (v_next_start.has_param()) {
    if (!needed) throw ValidationError("linking through an e_param axis needs the diagonal range");
    const auto& q = v_next_start.e_param_axis();
    const double slack = 1e-9 * std::max(1.0, std::abs(q.back()));
    if (needed->lo < q.front() - slack || needed->hi > q.back() + slack) {
      std::ostringstream os;
      os << "e_param axis [" << q.front() << ", " << q.back()
         << "] of the next period does not cover the diagonal range [" << needed->lo << ", "
         << needed->hi << "]";
      throw ValidationError(os.str());
    }
  }
  auto slice = std::make_shared<const GridSlice>(v_next_start);
  TerminalSurface::Fn below = [slice](double p, double e, double) {
    return continuation(*slice, p, e, e);
  };
  TerminalSurface::JumpFn jump = [cap](double e_param) { return cap(e_param); };
  return TerminalSurface(std::move(below), std::move(jump), lipschitz_in_p(*slice),
                         TerminalSurface::Representation::grid_sampled, !cap.is_constant(),
                         "link(next period start, cap)");
}

TerminalSurface link_terminal(const ValueGrid& v_next, const CapFunction& cap,
                              std::optional<DiagonalRange> needed) {
  return link_terminal(GridSlice::from(v_next, 0), cap, needed);
}

TerminalSurface shifted_continuation(const GridSlice& w_start, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("per-period cap lambda must be positive");
  if (w_start.has_param()) throw ValidationError("stationary continuation cannot carry an e_param axis");
  auto slice = std::make_shared<const GridSlice>(w_start);
  TerminalSurface::Fn below = [slice, lambda](double p, double e, double) {
    return continuation(*slice, p, e - lambda, 0.0);
  };
  std::ostringstream os;
  os << "shifted continuation (lambda=" << lambda << ")";
  return TerminalSurface(std::move(below), [lambda](double) { return lambda; },
                         lipschitz_in_p(*slice), TerminalSurface::Representation::grid_sampled,
                         false, os.str());
}

}  // namespace carbon
