#include "carbon/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/hashing.hpp"

namespace carbon {

std::string to_string(ReferenceSolution::Kind kind) {
  return kind == ReferenceSolution::Kind::fine_grid ? "fine-grid" : "closed-form-rarefaction";
}

ReferenceSolution burgers_rarefaction(double c, double level, double tau, double r) {
  if (r != 0.0) throw ValidationError("the closed-form rarefaction exists only for r = 0");
  if (!(tau > 0.0)) throw ValidationError("tau must be positive");
  ReferenceSolution ref;
  ref.kind = ReferenceSolution::Kind::closed_form_rarefaction;
  ref.t_lo = 0.0;
  ref.t_hi = tau;
  ref.e_lo = -std::numeric_limits<double>::infinity();
  ref.e_hi = std::numeric_limits<double>::infinity();
  ref.evaluate = [c, level, tau](double t, double, double e) {
    const double remaining = tau - t;
    if (remaining <= 0.0) return e >= level ? 1.0 : 0.0;
    return std::clamp((e - level + c * remaining) / remaining, 0.0, 1.0);
  };
  std::ostringstream os;
  os.precision(17);
  os << "clamp((e - " << level << " + " << c << "(" << tau << " - t)) / (" << tau << " - t), 0, 1)";
  ref.provenance = os.str();
  return ref;
}

namespace {

SolverConfig refined(const SolverConfig& base, int factor) {
  SolverConfig c = base;
  c.viscosity = 0.0;
  c.n_steps = 0;
  c.e_grid.n_cells = base.e_grid.n_cells * factor;
  if (c.p_grid) c.p_grid->n_cells = base.p_grid->n_cells * factor;
  return c;
}

/// L1 distance between a grid and a coarser grid whose cells are unions of
/// `ratio` consecutive fine cells, both at t0 (slice 0).
double l1_against_coarse(const ValueGrid& fine, const ValueGrid& coarse, int ratio) {
  if (fine.ne() != coarse.ne() * static_cast<std::size_t>(ratio))
    throw ValidationError("grids are not nested");
  double sup = 0.0;
  for (std::size_t pc = 0; pc < coarse.np(); ++pc) {
    const double p = coarse.p_axis()[pc];
    double sum = 0.0;
    for (std::size_t ec = 0; ec < coarse.ne(); ++ec) {
      double avg = 0.0;
      for (int j = 0; j < ratio; ++j)
        avg += fine.evaluate_slice(0, p, fine.e_axis()[ec * ratio + j]);
      avg /= ratio;
      sum += std::abs(avg - coarse.at(0, pc, ec));
    }
    sup = std::max(sup, sum * coarse.de());
  }
  return sup;
}

}  // namespace

ReferenceSolution fine_grid_reference(const FineGridProblem& problem, int refine_factor,
                                      double max_cell_steps) {
  if (refine_factor < 8) throw ValidationError("refine_factor must be at least 8");
  const SolverConfig fine_cfg = refined(problem.base, refine_factor);
  const SolverConfig half_cfg = refined(problem.base, refine_factor / 2);
  fine_cfg.check();

  // explicit scheme: steps grow with the cell count, so estimate before solving
  const double horizon = problem.tau - problem.t0;
  const double de = (fine_cfg.e_grid.max - fine_cfg.e_grid.min) / fine_cfg.e_grid.n_cells;
  const double speed = std::max(max_abs_rate(problem.coeffs, fine_cfg), 1e-12);
  const double cells = static_cast<double>(fine_cfg.e_grid.n_cells) *
                       (fine_cfg.p_grid ? fine_cfg.p_grid->n_cells + 1 : 1);
  const double steps = horizon * speed / (fine_cfg.cfl * de);
  if (cells * steps > max_cell_steps) {
    std::ostringstream os;
    os << "fine-grid reference needs about " << cells * steps << " cell updates, budget "
       << max_cell_steps;
    throw ValidationError(os.str());
  }

  auto fine = std::make_shared<const ValueGrid>(
      solve_one_period(problem.coeffs, problem.terminal, problem.t0, problem.tau, fine_cfg));
  const ValueGrid half =
      solve_one_period(problem.coeffs, problem.terminal, problem.t0, problem.tau, half_cfg);

  ReferenceSolution ref;
  ref.kind = ReferenceSolution::Kind::fine_grid;
  ref.t_lo = problem.t0;
  ref.t_hi = problem.tau;
  ref.e_lo = fine->e_axis().front();
  ref.e_hi = fine->e_axis().back();
  ref.grid = fine;
  ref.provenance = sha256_hex(fine_cfg.fingerprint());
  ref.self_convergence = l1_against_coarse(*fine, half, 2);
  ref.evaluate = [fine](double t, double p, double e) {
    const std::size_t ti = fine->nearest_slice(t);
    if (std::abs(fine->t_axis()[ti] - t) <= 1e-12 * std::max(1.0, std::abs(t)))
      return fine->evaluate_slice(ti, p, e);
    return fine->evaluate(t, p, e);
  };
  return ref;
}

namespace {

std::size_t slice_at(const ValueGrid& grid, double t) {
  const std::size_t ti = grid.nearest_slice(t);
  if (std::abs(grid.t_axis()[ti] - t) > 1e-9 * std::max(1.0, std::abs(t))) {
    std::ostringstream os;
    os << "t=" << t << " is not a stored slice";
    throw ValidationError(os.str());
  }
  return ti;
}

/// Mean of ref(t, p, .) over [lo, hi]: 4-point Gauss-Legendre on 8 sub-cells.
double ref_cell_average(const ReferenceSolution& ref, double t, double p, double lo, double hi) {
  static constexpr double x[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                  0.8611363115940526};
  static constexpr double w[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                  0.3478548451374538};
  constexpr int sub = 8;
  const double h = (hi - lo) / sub;
  double sum = 0.0;
  for (int s = 0; s < sub; ++s) {
    const double mid = lo + (s + 0.5) * h;
    for (int i = 0; i < 4; ++i) sum += w[i] * ref(t, p, mid + 0.5 * h * x[i]);
  }
  return sum / (2.0 * sub);
}

}  // namespace

double compare_l1(const ValueGrid& grid, const ReferenceSolution& ref, double t) {
  const std::size_t ti = slice_at(grid, t);
  const double de = grid.de();
  double sup = 0.0;
  bool overlap = false;
  for (std::size_t pi = 0; pi < grid.np(); ++pi) {
    const double p = grid.p_axis()[pi];
    double sum = 0.0;
    for (std::size_t ei = 0; ei < grid.ne(); ++ei) {
      const double lo = grid.e_axis()[ei] - 0.5 * de;
      const double hi = lo + de;
      if (lo < ref.e_lo - 1e-12 || hi > ref.e_hi + 1e-12) continue;
      overlap = true;
      sum += std::abs(grid.at(ti, pi, ei) - ref_cell_average(ref, t, p, lo, hi));
    }
    sup = std::max(sup, sum * de);
  }
  if (!overlap) throw ValidationError("grid and reference domains do not overlap");
  return sup;
}

double compare_sup(const ValueGrid& grid, const ReferenceSolution& ref, double t) {
  const std::size_t ti = slice_at(grid, t);
  double sup = 0.0;
  for (std::size_t pi = 0; pi < grid.np(); ++pi)
    for (std::size_t ei = 0; ei < grid.ne(); ++ei) {
      const double e = grid.e_axis()[ei];
      if (e < ref.e_lo || e > ref.e_hi) continue;
      sup = std::max(sup, std::abs(grid.at(ti, pi, ei) - ref(t, grid.p_axis()[pi], e)));
    }
  return sup;
}

ValueGrid sample_reference(const ReferenceSolution& ref, const Axis& t, const Axis& p,
                           const Axis& e, GridMetadata meta) {
  meta.label = to_string(ref.kind);
  ValueGrid g(t, p, e, Axis{}, meta);
  for (std::size_t ti = 0; ti < g.nt(); ++ti)
    for (std::size_t pi = 0; pi < g.np(); ++pi)
      for (std::size_t ei = 0; ei < g.ne(); ++ei) g.at(ti, pi, ei) = ref(t[ti], p[pi], e[ei]);
  return g;
}

}  // namespace carbon
