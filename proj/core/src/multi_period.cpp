#include "carbon/multi_period.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

MultiPeriodField::MultiPeriodField(MarketSpec spec, std::vector<ValueGrid> grids,
                                   std::vector<TerminalSurface> terminals,
                                   std::vector<std::optional<DiagonalRange>> reach)
    : spec_(std::move(spec)), grids_(std::move(grids)), terminals_(std::move(terminals)),
      reach_(std::move(reach)) {
  if (grids_.empty()) throw ValidationError("multi-period field needs at least one period");
  if (terminals_.size() != grids_.size() || reach_.size() != grids_.size())
    throw ValidationError("multi-period field parts have inconsistent lengths");
}

int MultiPeriodField::period_at(double t) const {
  const auto& ends = spec_.period_ends;
  if (t < 0.0 || t >= ends.back()) {
    std::ostringstream os;
    os << "t=" << t << " outside [0, " << ends.back() << ")";
    throw GridBoundsError(os.str());
  }
  const auto it = std::upper_bound(ends.begin(), ends.end(), t);
  return static_cast<int>(it - ends.begin()) + 1;
}

double MultiPeriodField::evaluate(double t, double p, double e, double e_param) const {
  return period(period_at(t)).evaluate(t, p, e, e_param);
}

DiagonalRange reachable_readings(const MarketSpec& spec, const CoefficientSet& coeffs,
                                 const SolverConfig& config, int k) {
  double lo_rate = std::numeric_limits<double>::infinity();
  double hi_rate = -std::numeric_limits<double>::infinity();
  const std::vector<double> ps =
      coeffs.dim_p == 0 || !config.p_grid
          ? std::vector<double>{0.0}
          : Axis::uniform(config.p_grid->min, config.p_grid->max,
                          static_cast<std::size_t>(config.p_grid->n_cells) + 1)
                .nodes();
  for (double p : ps) {
    // mu is decreasing in y, so the extremes sit at y = 0 and y = 1
    lo_rate = std::min(lo_rate, coeffs.mu(p, 1.0));
    hi_rate = std::max(hi_rate, coeffs.mu(p, 0.0));
  }
  const double elapsed = spec.period_start(k);
  return {spec.initial_emissions + lo_rate * elapsed, spec.initial_emissions + hi_rate * elapsed};
}

namespace {

Axis e_param_axis_for(const DiagonalRange& reach, const SolverConfig& config) {
  const double de = (config.e_grid.max - config.e_grid.min) / config.e_grid.n_cells;
  std::vector<double> nodes;
  for (int i = 0; i < config.e_grid.n_cells; ++i) {
    const double c = config.e_grid.min + (i + 0.5) * de;
    if (c >= reach.lo - de * (1 + 1e-9) && c <= reach.hi + de * (1 + 1e-9)) nodes.push_back(c);
  }
  if (nodes.size() < 2) {
    std::ostringstream os;
    os << "e-grid cannot host the reachable readings [" << reach.lo << ", " << reach.hi << "]";
    throw ValidationError(os.str());
  }
  if (nodes.front() > reach.lo + 1e-12 || nodes.back() < reach.hi - 1e-12) {
    std::ostringstream os;
    os << "e-grid [" << config.e_grid.min << ", " << config.e_grid.max
       << "] does not cover the reachable readings [" << reach.lo << ", " << reach.hi << "]";
    throw ValidationError(os.str());
  }
  return Axis(std::move(nodes));
}

}  // namespace

MultiPeriodField solve_multi_period(const MarketSpec& spec, const CoefficientSet& coeffs,
                                    const SolverConfig& config) {
  spec.check();
  if (spec.infinite) throw ValidationError("solve_multi_period needs a finite market");
  const int q = spec.num_periods();
  std::vector<ValueGrid> grids(static_cast<std::size_t>(q));
  std::vector<TerminalSurface> terminals;
  std::vector<std::optional<DiagonalRange>> reach(static_cast<std::size_t>(q));
  terminals.reserve(static_cast<std::size_t>(q));
  std::vector<std::optional<TerminalSurface>> terms(static_cast<std::size_t>(q));

  for (int k = q; k >= 1; --k) {
    try {
      TerminalSurface phi = k == q ? spec.final_condition()
                                   : link_terminal(grids[static_cast<std::size_t>(k)], spec.cap(k),
                                                   reach[static_cast<std::size_t>(k)]);
      std::optional<Axis> e_param;
      if (phi.parametrized()) {
        reach[static_cast<std::size_t>(k - 1)] = reachable_readings(spec, coeffs, config, k);
        e_param = e_param_axis_for(*reach[static_cast<std::size_t>(k - 1)], config);
      }
      ValueGrid g = solve_one_period(coeffs, phi, spec.period_start(k), spec.period_end(k), config, e_param);
      g.metadata().period = k;
      grids[static_cast<std::size_t>(k - 1)] = std::move(g);
      terms[static_cast<std::size_t>(k - 1)] = std::move(phi);
    } catch (const SolverError& e) {
      std::ostringstream os;
      os << "period " << k << ": " << e.what();
      throw SolverError(os.str(), e.step(), k);
    } catch (const ValidationError& e) {
      std::ostringstream os;
      os << "period " << k << ": " << e.what();
      throw ValidationError(os.str());
    }
  }
  for (auto& t : terms) terminals.push_back(std::move(*t));
  return MultiPeriodField(spec, std::move(grids), std::move(terminals), std::move(reach));
}

namespace {

void require_constant_caps(const MultiPeriodField& f, double lambda, const char* which) {
  const auto& s = f.spec();
  const double tau = s.period_end(1);
  for (int k = 1; k <= f.num_periods(); ++k) {
    const auto& cap = s.cap(k);
    const double want = k * lambda;
    if (!cap.is_constant() || std::abs(cap(0.0) - want) > 1e-9 * std::max(1.0, std::abs(want))) {
      std::ostringstream os;
      os << which << " field: cap " << k << " is not " << want << " (Lambda_k = k lambda required)";
      throw ValidationError(os.str());
    }
    if (std::abs(s.period_end(k) - k * tau) > 1e-9 * std::max(1.0, k * tau))
      throw ValidationError(std::string(which) + " field: compliance dates are not equally spaced");
  }
}

}  // namespace

std::vector<TranslationResidual> translation_check(const MultiPeriodField& field_q,
                                                   const MultiPeriodField& field_qm1,
                                                   double lambda) {
  const int q = field_q.num_periods();
  if (q < 2 || field_qm1.num_periods() != q - 1)
    throw ValidationError("translation check needs fields with q and q - 1 periods, q >= 2");
  require_constant_caps(field_q, lambda, "q-period");
  require_constant_caps(field_qm1, lambda, "(q-1)-period");
  if (std::abs(field_q.spec().period_end(1) - field_qm1.spec().period_end(1)) > 1e-12)
    throw ValidationError("translation check needs equal period lengths");

  std::vector<TranslationResidual> out;
  for (int k = 1; k <= q - 1; ++k) {
    const GridSlice lhs = period_start_slice(field_q, k);
    const GridSlice rhs = period_start_slice(field_qm1, k - 1);
    TranslationResidual r{k, 0.0, 0};
    for (std::size_t pi = 0; pi < lhs.np(); ++pi) {
      const double p = lhs.p_axis()[pi];
      if (lhs.has_factor() && !rhs.p_axis().contains(p)) continue;
      for (std::size_t ei = 0; ei < lhs.ne(); ++ei) {
        const double shifted = lhs.e_axis()[ei] - lambda;
        if (!rhs.e_axis().contains(shifted)) continue;
        r.sup_residual = std::max(r.sup_residual, std::abs(lhs.at(pi, ei) - rhs.evaluate(p, shifted)));
        ++r.nodes_compared;
      }
    }
    out.push_back(r);
  }
  return out;
}

GridSlice period_start_slice(const MultiPeriodField& field, int k) {
  if (k < 0 || k >= field.num_periods()) {
    std::ostringstream os;
    os << "period start index " << k << " outside [0, " << field.num_periods() << ")";
    throw GridBoundsError(os.str());
  }
  return GridSlice::from(field.period(k + 1), 0);
}

}  // namespace carbon
