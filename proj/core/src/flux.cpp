#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/solver.hpp"

namespace carbon {

std::string to_string(FluxScheme scheme) {
  return scheme == FluxScheme::godunov ? "godunov" : "engquist-osher";
}

FluxScheme flux_scheme_from_string(const std::string& s) {
  if (s == "godunov") return FluxScheme::godunov;
  if (s == "engquist-osher") return FluxScheme::engquist_osher;
  throw ValidationError("unknown flux scheme '" + s + "'");
}

FluxFunction::FluxFunction(const CoefficientSet& coeffs, double quad_tol)
    : coeffs_(coeffs), quad_tol_(quad_tol) {
  coeffs_.check_constants();
}

double FluxFunction::operator()(double p, double y) const {
  if (coeffs_.rate_antiderivative) return -coeffs_.rate_antiderivative(p, y);
  if (y == 0.0) return 0.0;
  double err = 0.0;
  const double m = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double u) { return coeffs_.mu(p, u); }, 0.0, y, 12, 1e-13, &err);
  if (!std::isfinite(m) || err > quad_tol_) {
    std::ostringstream os;
    os << "flux quadrature did not converge at p=" << p << ", y=" << y << " (error estimate " << err
       << ")";
    throw SolverError(os.str());
  }
  return -m;
}

double FluxFunction::minimizer(double p) const {
  if (coeffs_.rate_root) return std::clamp(coeffs_.rate_root(p), 0.0, 1.0);
  if (coeffs_.mu(p, 0.0) <= 0.0) return 0.0;
  if (coeffs_.mu(p, 1.0) >= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (coeffs_.mu(p, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

FluxFunction make_flux(const CoefficientSet& coeffs) { return FluxFunction(coeffs); }

double numerical_flux(FluxScheme scheme, double f_left, double f_right, double f_min,
                      double u_left, double u_right, double u_min) {
  if (scheme == FluxScheme::engquist_osher) {
    return (u_left >= u_min ? f_left : f_min) + (u_right <= u_min ? f_right : f_min) - f_min;
  }
  if (u_left <= u_right) {
    if (u_min < u_left) return f_left;
    if (u_min > u_right) return f_right;
    return f_min;
  }
  return std::max(f_left, f_right);
}

namespace {

double bump(double x) {
  // x in (-1, 1)
  const double d = 1.0 - x * x;
  return d <= 0.0 ? 0.0 : std::exp(-1.0 / d);
}

template <class F>
double quad(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 10, 1e-14);
}

}  // namespace

TerminalSurface mollify_terminal(const TerminalSurface& phi, double delta) {
  if (!(delta >= 0.0)) throw ValidationError("mollification width must be >= 0");
  if (delta == 0.0) return phi;
  const double half = 0.5 * delta;
  const double norm = quad([](double x) { return bump(x); }, -1.0, 1.0) * half;
  auto rho = [half, norm](double z) { return bump(z / half) / norm; };

  auto smoothed = [phi, half, rho](double p, double e, double q) {
    const auto& below = phi.continuous_part();
    auto cont = [&](double z) { return below(p, e - z, q) * rho(z); };
    double out;
    if (!phi.has_jump()) {
      out = quad(cont, -half, half);
    } else {
      // phi(e - z) = 1 where z <= e - jump
      const double split = std::clamp(e - phi.jump_location(q), -half, half);
      out = quad(rho, -half, split) + quad(cont, split, half);
    }
    return std::clamp(out, 0.0, 1.0);
  };
  std::ostringstream os;
  os << phi.label() << " mollified(" << delta << ")";
  return TerminalSurface(smoothed, nullptr, phi.lipschitz_p(), phi.representation(),
                         phi.parametrized(), os.str());
}

}  // namespace carbon
