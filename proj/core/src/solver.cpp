#include "carbon/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/hashing.hpp"
#include "carbon/parallel.hpp"

namespace carbon {

void SolverConfig::check() const {
  if (!(e_grid.max > e_grid.min) || e_grid.n_cells < 2) throw ValidationError("e-grid is degenerate");
  if (p_grid && (!(p_grid->max > p_grid->min) || p_grid->n_cells < 1))
    throw ValidationError("p-grid is degenerate");
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ValidationError("cfl target must lie in (0, 1]");
  if (!(viscosity >= 0.0)) throw ValidationError("viscosity must be >= 0");
  if (!(mollify_width >= 0.0)) throw ValidationError("mollification width must be >= 0");
  if (n_steps < 0) throw ValidationError("n_steps must be >= 0");
  if (max_slices < 3) throw ValidationError("max_slices must be >= 3");
}

std::string SolverConfig::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "e:" << e_grid.min << ',' << e_grid.max << ',' << e_grid.n_cells;
  if (p_grid) os << ";p:" << p_grid->min << ',' << p_grid->max << ',' << p_grid->n_cells;
  os << ";n_steps:" << n_steps << ";cfl:" << cfl << ";eps:" << viscosity << ";delta:" << mollify_width
     << ";flux:" << to_string(flux) << ";slices:" << max_slices;
  return os.str();
}

namespace {

std::vector<double> p_nodes(const CoefficientSet& coeffs, const SolverConfig& config) {
  if (coeffs.dim_p == 0) return {0.0};
  if (coeffs.dim_p > 1)
    throw ValidationError("the reference solver supports dim_p in {0, 1}");
  if (!config.p_grid) throw ValidationError("dim_p = 1 needs a p-grid in the solver config");
  return Axis::uniform(config.p_grid->min, config.p_grid->max,
                       static_cast<std::size_t>(config.p_grid->n_cells) + 1)
      .nodes();
}

}  // namespace

double max_abs_rate(const CoefficientSet& coeffs, const SolverConfig& config) {
  double m = 0.0;
  for (double p : p_nodes(coeffs, config))
    m = std::max({m, std::abs(coeffs.mu(p, 0.0)), std::abs(coeffs.mu(p, 1.0))});
  return m;
}

AxisSpec auto_e_grid(const CoefficientSet& coeffs, const SolverConfig& config, double cap_lo,
                     double cap_hi, double horizon, int n_cells) {
  const double margin = 1.5 * horizon * max_abs_rate(coeffs, config);
  return {cap_lo - margin, cap_hi + margin, n_cells};
}

void check_domain_of_dependence(const CoefficientSet& coeffs, const SolverConfig& config,
                                double cap_lo, double cap_hi, double horizon) {
  const double need = horizon * max_abs_rate(coeffs, config);
  if (config.e_grid.min > cap_lo - need || config.e_grid.max < cap_hi + need) {
    std::ostringstream os;
    os << "e-grid [" << config.e_grid.min << ", " << config.e_grid.max
       << "] does not contain the domain of dependence [" << cap_lo - need << ", " << cap_hi + need
       << "]";
    throw ValidationError(os.str());
  }
}

ValueGrid solve_one_period(const CoefficientSet& coeffs, const TerminalSurface& phi_in, double t0,
                           double tau, const SolverConfig& config,
                           const std::optional<Axis>& e_param, SolveInfo* info) {
  coeffs.check_constants();
  config.check();
  if (!(tau > t0)) throw ValidationError("solve_one_period needs t0 < tau");
  if (phi_in.parametrized() && !e_param)
    throw ValidationError("parametrized terminal data needs an e_param axis");

  const TerminalSurface phi = mollify_terminal(phi_in, config.mollify_width);
  const std::vector<double> ps = p_nodes(coeffs, config);
  const std::size_t np = ps.size();
  const std::size_t ne = static_cast<std::size_t>(config.e_grid.n_cells);
  const double de = (config.e_grid.max - config.e_grid.min) / static_cast<double>(ne);
  const double e_lo = config.e_grid.min, e_hi = config.e_grid.max;
  const double dp = np > 1 ? ps[1] - ps[0] : 1.0;
  const double eps2 = config.viscosity * config.viscosity;

  // Row coefficients.
  const FluxFunction flux(coeffs);
  std::vector<double> b(np, 0.0), a(np, 0.0), u_min(np), f_min(np);
  double max_speed = 0.0, diffusion = eps2 / (de * de);
  double max_p_rate = 0.0;
  for (std::size_t j = 0; j < np; ++j) {
    if (coeffs.dim_p > 0) {
      b[j] = coeffs.b(ps[j]);
      a[j] = coeffs.sigma(ps[j]) * coeffs.sigma(ps[j]);
      if (!std::isfinite(b[j]) || !std::isfinite(a[j]))
        throw ValidationError("non-finite drift or volatility on the p-grid");
      max_p_rate = std::max(max_p_rate, std::abs(b[j]) / dp + (a[j] + eps2) / (dp * dp));
    }
    u_min[j] = flux.minimizer(ps[j]);
    f_min[j] = flux(ps[j], u_min[j]);
    max_speed = std::max({max_speed, std::abs(coeffs.mu(ps[j], 0.0)), std::abs(coeffs.mu(ps[j], 1.0))});
  }
  if (!std::isfinite(max_speed)) throw ValidationError("non-finite emissions rate on the grid");
  diffusion += max_p_rate;

  const double horizon = tau - t0;
  double dt_max = std::numeric_limits<double>::infinity();
  if (max_speed > 0.0) dt_max = std::min(dt_max, config.cfl * de / max_speed);
  if (diffusion > 0.0) dt_max = std::min(dt_max, config.cfl / diffusion);
  long long n_required = std::isfinite(dt_max) ? static_cast<long long>(std::ceil(horizon / dt_max * (1 - 1e-12))) : 1;
  n_required = std::max(1LL, n_required);
  long long n_steps = std::max<long long>(n_required, config.n_steps);
  if (n_steps > config.max_steps) {
    std::ostringstream os;
    os << "stability bound needs " << n_steps << " time steps, above max_steps=" << config.max_steps;
    throw SolverError(os.str());
  }
  const double dt = horizon / static_cast<double>(n_steps);
  const double decay = std::exp(-coeffs.rate * dt);

  // Stored slices, by backward step index m (t = tau - m dt).
  const long long stride = std::max<long long>(1, (n_steps + config.max_slices - 4) / (config.max_slices - 3));
  std::vector<long long> saved;
  for (long long m = n_steps; m >= 0; --m)
    if (m == 0 || m == 1 || m == n_steps || m % stride == 0) saved.push_back(m);
  std::vector<double> times;
  for (long long m : saved) times.push_back(m == n_steps ? t0 : (m == 0 ? tau : tau - static_cast<double>(m) * dt));
  // slice index for each saved m
  std::vector<std::ptrdiff_t> slot(static_cast<std::size_t>(n_steps) + 1, -1);
  for (std::size_t k = 0; k < saved.size(); ++k) slot[static_cast<std::size_t>(saved[k])] = static_cast<std::ptrdiff_t>(k);

  GridMetadata meta;
  meta.t0 = t0;
  meta.tau = tau;
  meta.rate = coeffs.rate;
  meta.dim_p = coeffs.dim_p;
  meta.label = phi.label();
  meta.config_hash = sha256_hex(config.fingerprint());
  ValueGrid grid(Axis(times), coeffs.dim_p > 0 ? Axis(ps) : Axis(),
                 Axis::uniform(e_lo + 0.5 * de, e_hi - 0.5 * de, ne), e_param ? *e_param : Axis(),
                 meta);

  const std::size_t nq = grid.nq();
  std::vector<double> terminal_projection(np * ne * nq);

  auto solve_slice = [&](std::size_t qi) {
    const double q = e_param ? (*e_param)[qi] : 0.0;
    std::vector<double> u(np * ne), next(np * ne), fv(ne + 2), faces(ne + 1);
    std::vector<double> ghost_lo(np), ghost_hi(np);
    for (std::size_t j = 0; j < np; ++j) {
      ghost_lo[j] = phi(ps[j], e_lo, q);
      ghost_hi[j] = phi(ps[j], e_hi, q);
      for (std::size_t i = 0; i < ne; ++i) {
        const double lo = e_lo + static_cast<double>(i) * de;
        const double v = phi.cell_average(ps[j], lo, lo + de, q);
        if (!(v >= -1e-12 && v <= 1.0 + 1e-12) || !std::isfinite(v))
          throw ValidationError("terminal data must map into [0, 1]");
        u[j * ne + i] = std::clamp(v, 0.0, 1.0);
      }
    }
    for (std::size_t j = 0; j < np; ++j)
      for (std::size_t i = 0; i < ne; ++i) terminal_projection[(j * ne + i) * nq + qi] = u[j * ne + i];

    auto store = [&](long long m) {
      const auto k = slot[static_cast<std::size_t>(m)];
      if (k < 0) return;
      for (std::size_t j = 0; j < np; ++j)
        for (std::size_t i = 0; i < ne; ++i) grid.at(static_cast<std::size_t>(k), j, i, qi) = u[j * ne + i];
    };
    store(0);

    double boundary_scale = 1.0;  // e^{-r s} at the start of the step
    const double lam = dt / de;
    for (long long m = 1; m <= n_steps; ++m) {
      // Transport in e, one p-row at a time.
      for (std::size_t j = 0; j < np; ++j) {
        double* row = u.data() + j * ne;
        const double lo_state = boundary_scale * ghost_lo[j];
        const double hi_state = boundary_scale * ghost_hi[j];
        fv[0] = flux(ps[j], lo_state);
        for (std::size_t i = 0; i < ne; ++i) fv[i + 1] = flux(ps[j], row[i]);
        fv[ne + 1] = flux(ps[j], hi_state);
        for (std::size_t f = 0; f <= ne; ++f) {
          const double ul = f == 0 ? lo_state : row[f - 1];
          const double ur = f == ne ? hi_state : row[f];
          faces[f] = numerical_flux(config.flux, fv[f], fv[f + 1], f_min[j], ul, ur, u_min[j]);
        }
        for (std::size_t i = 0; i < ne; ++i) row[i] -= lam * (faces[i + 1] - faces[i]);
      }

      // Factor operator and artificial viscosity.
      if (coeffs.dim_p > 0 || eps2 > 0.0) {
        next = u;
        const double inv_dp2 = 1.0 / (dp * dp), inv_de2 = 1.0 / (de * de);
        for (std::size_t j = 0; j < np; ++j) {
          for (std::size_t i = 0; i < ne; ++i) {
            const double c = u[j * ne + i];
            double rhs = 0.0;
            if (coeffs.dim_p > 0) {
              const bool lo_edge = j == 0, hi_edge = j + 1 == np;
              // drift, upwinded for d_s u = b d_p u; a linear ghost at the edges
              double fwd, bwd;
              if (lo_edge) {
                fwd = u[(j + 1) * ne + i] - c;
                bwd = fwd;
              } else if (hi_edge) {
                bwd = c - u[(j - 1) * ne + i];
                fwd = bwd;
              } else {
                fwd = u[(j + 1) * ne + i] - c;
                bwd = c - u[(j - 1) * ne + i];
              }
              rhs += b[j] * (b[j] > 0.0 ? fwd : bwd) / dp;
              // vanishing second derivative at the p-edges
              if (!lo_edge && !hi_edge)
                rhs += 0.5 * (a[j] + eps2) * (fwd - bwd) * inv_dp2;
            }
            if (eps2 > 0.0) {
              const double left = i == 0 ? boundary_scale * ghost_lo[j] : u[j * ne + i - 1];
              const double right = i + 1 == ne ? boundary_scale * ghost_hi[j] : u[j * ne + i + 1];
              rhs += 0.5 * eps2 * (left - 2.0 * c + right) * inv_de2;
            }
            next[j * ne + i] = c + dt * rhs;
          }
        }
        std::swap(u, next);
      }

      for (double& v : u) {
        v *= decay;
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite value at backward step " << m << " (t=" << tau - m * dt << ")";
          throw SolverError(os.str(), m);
        }
      }
      boundary_scale *= decay;
      store(m);
    }
  };

  parallel_for(nq, resolve_threads(config.threads), solve_slice);

  grid.metadata().terminal_hash = sha256_hex(std::span<const double>(terminal_projection));
  if (info) {
    info->n_steps = static_cast<int>(n_steps);
    info->dt = dt;
    info->steps_adjusted = config.n_steps > 0 && n_steps > config.n_steps;
    info->max_speed = max_speed;
    info->diffusion_rate = diffusion;
  }
  return grid;
}

}  // namespace carbon
