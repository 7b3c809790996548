#include "carbon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

std::string DiagnosticsReport::summary() const {
  std::ostringstream os;
  os << "monotonicity violations " << monotonicity_violations << ", range violations "
     << range_violations << ", Lipschitz violations " << lipschitz_violations
     << " (worst quotient/bound " << worst_lipschitz_ratio << ")";
  if (!monotonicity_asserted())
    os << "; terminal data not monotone in e (" << terminal_monotonicity_violations
       << "), monotonicity not asserted";
  return os.str();
}

DiagnosticsReport diagnostics(const ValueGrid& grid, const CoefficientSet& coeffs,
                              const DiagnosticsOptions& opt) {
  const auto& meta = grid.metadata();
  DiagnosticsReport rep;
  const double de = grid.de();
  for (std::size_t ti = 0; ti < grid.nt(); ++ti) {
    SliceDiagnostics s;
    s.t = grid.t_axis()[ti];
    const double remaining = meta.tau - s.t;
    const bool terminal = ti + 1 == grid.nt();
    s.e_lipschitz_bound = terminal ? std::numeric_limits<double>::infinity()
                                   : 1.0 / (coeffs.mono_l1 * remaining);
    const double ceiling = std::exp(-meta.rate * remaining);
    for (std::size_t pi = 0; pi < grid.np(); ++pi) {
      double tail = 0.0;
      for (std::size_t qi = 0; qi < grid.nq(); ++qi) {
        for (std::size_t ei = 0; ei < grid.ne(); ++ei) {
          const double v = grid.at(ti, pi, ei, qi);
          if (!(v >= -opt.tol && v <= ceiling * (1 + opt.tol) + opt.tol)) ++rep.range_violations;
          if (ei + 1 < grid.ne()) {
            const double dv = grid.at(ti, pi, ei + 1, qi) - v;
            if (dv < -opt.tol) {
              ++rep.monotonicity_violations;
              if (terminal) ++rep.terminal_monotonicity_violations;
            }
            s.max_e_quotient = std::max(s.max_e_quotient, dv / de);
          }
          if (qi == 0 && grid.e_axis()[ei] < 0.0) tail += v * de;
        }
        s.left_boundary_value = std::max(s.left_boundary_value, grid.at(ti, pi, 0, qi));
        s.right_limit_residual =
            std::max(s.right_limit_residual, std::abs(grid.at(ti, pi, grid.ne() - 1, qi) - ceiling));
      }
      s.left_tail_integral = std::max(s.left_tail_integral, tail);
    }
    if (!terminal && remaining >= opt.lipschitz_horizon - 1e-12) {
      const double ratio = s.max_e_quotient / s.e_lipschitz_bound;
      rep.worst_lipschitz_ratio = std::max(rep.worst_lipschitz_ratio, ratio);
      if (ratio > 1.0 + opt.lipschitz_slack) ++rep.lipschitz_violations;
    }
    rep.slices.push_back(s);
  }
  return rep;
}

std::vector<double> z_estimate(const ValueGrid& grid, const CoefficientSet& coeffs,
                               std::size_t ti, std::size_t qi) {
  if (ti >= grid.nt() || qi >= grid.nq()) throw GridBoundsError("z_estimate slice out of range");
  std::vector<double> z(grid.np() * grid.ne(), 0.0);
  if (!grid.has_factor()) return z;
  const auto& p = grid.p_axis();
  for (std::size_t pi = 0; pi < grid.np(); ++pi) {
    const std::size_t lo = pi == 0 ? 0 : pi - 1;
    const std::size_t hi = pi + 1 == grid.np() ? pi : pi + 1;
    const double sig = coeffs.sigma(p[pi]);
    for (std::size_t ei = 0; ei < grid.ne(); ++ei)
      z[pi * grid.ne() + ei] =
          sig * (grid.at(ti, hi, ei, qi) - grid.at(ti, lo, ei, qi)) / (p[hi] - p[lo]);
  }
  return z;
}

}  // namespace carbon
