#include "carbon/infinite_period.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/linking.hpp"

namespace carbon {

double l1_distance(const ValueGrid& a, const ValueGrid& b, std::size_t ti) {
  if (a.np() != b.np() || a.ne() != b.ne() || a.nq() != b.nq())
    throw ValidationError("l1_distance needs grids on the same axes");
  double sup = 0.0;
  for (std::size_t pi = 0; pi < a.np(); ++pi) {
    double sum = 0.0;
    for (std::size_t ei = 0; ei < a.ne(); ++ei)
      for (std::size_t qi = 0; qi < a.nq(); ++qi) sum += std::abs(a.at(ti, pi, ei, qi) - b.at(ti, pi, ei, qi));
    sup = std::max(sup, sum * a.de());
  }
  return sup;
}

namespace {

double l1_norm(const ValueGrid& a, std::size_t ti) {
  double sup = 0.0;
  for (std::size_t pi = 0; pi < a.np(); ++pi) {
    double sum = 0.0;
    for (std::size_t ei = 0; ei < a.ne(); ++ei) sum += std::abs(a.at(ti, pi, ei));
    sup = std::max(sup, sum * a.de());
  }
  return sup;
}

void require_inputs(const CoefficientSet& coeffs, const PicardSettings& s) {
  if (!(coeffs.rate > 0.0))
    throw ValidationError("the infinite-period field is unique only for r > 0");
  if (!(s.lambda > 0.0)) throw ValidationError("per-period cap lambda must be positive");
  if (!(s.tau > 0.0)) throw ValidationError("period length tau must be positive");
}

}  // namespace

PicardState picard_step(const PicardState& state, const CoefficientSet& coeffs,
                        const PicardSettings& settings, const SolverConfig& config) {
  require_inputs(coeffs, settings);
  const double e_span = config.e_grid.max - config.e_grid.min;
  if (!(settings.lambda < e_span))
    throw ValidationError("e-grid is too narrow to represent the lambda shift");

  const TerminalSurface phi =
      state.iteration == 0 || !state.current
          ? TerminalSurface::indicator(settings.lambda)
          : shifted_continuation(GridSlice::from(*state.current, 0), settings.lambda);
  auto next = std::make_shared<const ValueGrid>(
      solve_one_period(coeffs, phi, 0.0, settings.tau, config));

  PicardState out = state;
  out.iteration = state.iteration + 1;
  const double residual = state.current ? l1_distance(*next, *state.current, 0) : l1_norm(*next, 0);
  if (!out.residuals.empty()) {
    const double prev = out.residuals.back();
    out.ratios.push_back(prev > 0.0 ? residual / prev : 0.0);
  }
  out.residuals.push_back(residual);

  double min_inc = std::numeric_limits<double>::infinity();
  const auto now = next->values();
  if (state.current) {
    const auto before = state.current->values();
    if (before.size() != now.size()) throw ValidationError("Picard iterates changed shape");
    for (std::size_t i = 0; i < now.size(); ++i) min_inc = std::min(min_inc, now[i] - before[i]);
  } else {
    for (double v : now) min_inc = std::min(min_inc, v);
  }
  out.min_increments.push_back(min_inc);
  out.current = std::move(next);
  return out;
}

StructuralCheck check_structure(const CoefficientSet& coeffs, const SolverConfig& config) {
  StructuralCheck s;
  if (coeffs.dim_p == 0 || !config.p_grid) {
    s.drift_dominated = coeffs.rate > 0.0;
    return s;
  }
  const auto ps = Axis::uniform(config.p_grid->min, config.p_grid->max,
                                static_cast<std::size_t>(config.p_grid->n_cells) + 1);
  s.min_sigma = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ps.size(); ++i) {
    s.min_sigma = std::min(s.min_sigma, std::abs(coeffs.sigma(ps[i])));
    for (std::size_t j = i + 1; j < ps.size(); ++j)
      s.drift_lipschitz = std::max(
          s.drift_lipschitz, std::abs(coeffs.b(ps[j]) - coeffs.b(ps[i])) / (ps[j] - ps[i]));
  }
  // b(p) = -kappa p has L_b = kappa, but it is also dissipative; the sampled
  // constant is the conservative reading of the assumption.
  s.drift_dominated = coeffs.rate - s.drift_lipschitz > 0.0;
  s.uniformly_elliptic = s.min_sigma > 0.0;
  return s;
}

InfiniteSolution solve_infinite(const CoefficientSet& coeffs, const PicardSettings& settings,
                                const SolverConfig& config) {
  require_inputs(coeffs, settings);
  InfiniteSolution out;
  out.structure = check_structure(coeffs, config);

  PicardState state;
  const double span = config.e_grid.max - config.e_grid.min;
  state.tol_l1 = settings.tol_l1 > 0.0 ? settings.tol_l1 : 1e-4 * span;
  state.max_iter = settings.max_iter > 0
                       ? settings.max_iter
                       : static_cast<int>(std::ceil(std::log(state.tol_l1) /
                                                    (-coeffs.rate * settings.tau))) + 10;
  if (!out.structure.holds())
    state.warnings.push_back(
        "neither r - L_b > 0 nor uniform ellipticity holds on the p-grid; the Lipschitz-in-p "
        "certificate is withheld");

  while (state.iteration < state.max_iter) {
    state = picard_step(state, coeffs, settings, config);
    if (state.last_residual() <= state.tol_l1) {
      state.converged = true;
      break;
    }
  }
  if (!state.converged) {
    std::ostringstream os;
    os << "no convergence after " << state.iteration << " iterations (residual "
       << state.last_residual() << " > tol " << state.tol_l1 << ")";
    state.warnings.push_back(os.str());
  }

  const PicardState extra = picard_step(state, coeffs, settings, config);
  out.self_consistency = extra.last_residual();
  out.w = state.current;
  out.certificate = std::move(state);
  return out;
}

LeftTail l1_left_tail(const ValueGrid& w, double required_tail, double unit) {
  if (w.e_face_lo() > -required_tail + 1e-12) {
    std::ostringstream os;
    os << "grid reaches only " << w.e_face_lo() << " below 0, need " << -required_tail;
    throw ValidationError(os.str());
  }
  LeftTail out;
  const double cutoff = w.e_face_lo() + unit;
  for (std::size_t pi = 0; pi < w.np(); ++pi) {
    double total = 0.0, outer = 0.0;
    for (std::size_t ei = 0; ei < w.ne(); ++ei) {
      const double e = w.e_axis()[ei];
      if (e >= 0.0) break;
      const double v = w.at(0, pi, ei) * w.de();
      total += v;
      if (e < cutoff) outer += v;
    }
    out.integral.push_back(total);
    out.outermost_unit.push_back(outer);
  }
  return out;
}

}  // namespace carbon
