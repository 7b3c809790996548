#include "carbon/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

void CoefficientSet::check_constants() const {
  if (!emissions_rate) throw ValidationError("coefficient set has no emissions rate mu");
  if (dim_p < 0) throw ValidationError("dim_p must be non-negative");
  if (dim_p > 0 && (!drift || !vol))
    throw ValidationError("dim_p > 0 requires both drift b and volatility sigma");
  if (!(lipschitz > 0.0)) throw ValidationError("lipschitz constant L must be positive");
  if (!(mono_l1 > 0.0 && mono_l2 > 0.0))
    throw ValidationError("monotonicity constants l1, l2 must be positive");
  const double slack = 1e-12;
  if (!(1.0 / lipschitz <= mono_l1 * (1 + slack) && mono_l1 <= mono_l2 * (1 + slack) &&
        mono_l2 <= lipschitz * (1 + slack))) {
    std::ostringstream os;
    os << "declared constants violate 1/L <= l1 <= l2 <= L (L=" << lipschitz
       << ", l1=" << mono_l1 << ", l2=" << mono_l2 << ")";
    throw ValidationError(os.str());
  }
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ValidationError("rate r must be finite and >= 0");
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << (pass ? "pass" : "FAIL") << ": max Lipschitz ratio " << max_lipschitz_ratio
     << ", monotonicity ratio in [" << min_monotonicity_ratio << ", " << max_monotonicity_ratio
     << "], " << violations.size() << " violation(s) over " << pairs_checked << " pairs";
  return os.str();
}

namespace {

double checked(double v, const char* what, double p, double y) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << what << " returned a non-finite value at p=" << p << ", y=" << y;
    throw ValidationError(os.str());
  }
  return v;
}

std::vector<double> lattice(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

ValidationReport validate_coefficients(const CoefficientSet& coeffs, const SampleBox& box,
                                       int n_samples, double tol) {
  coeffs.check_constants();
  if (n_samples < 2) throw ValidationError("validate_coefficients needs n_samples >= 2");
  if (!(box.y_hi > box.y_lo)) throw ValidationError("sample box is degenerate in y");
  if (coeffs.dim_p > 0 && !(box.p_hi > box.p_lo))
    throw ValidationError("sample box is degenerate in p");

  const auto ps = coeffs.dim_p == 0 ? std::vector<double>{0.0} : lattice(box.p_lo, box.p_hi, n_samples);
  const auto ys = lattice(box.y_lo, box.y_hi, n_samples);

  // mu on the lattice, row-major (p, y)
  std::vector<double> mu(ps.size() * ys.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (coeffs.dim_p > 0) {
      checked(coeffs.b(ps[i]), "drift b", ps[i], 0.0);
      checked(coeffs.sigma(ps[i]), "volatility sigma", ps[i], 0.0);
    }
    for (std::size_t j = 0; j < ys.size(); ++j)
      mu[i * ys.size() + j] = checked(coeffs.mu(ps[i], ys[j]), "emissions rate mu", ps[i], ys[j]);
  }

  ValidationReport rep;
  rep.min_monotonicity_ratio = std::numeric_limits<double>::infinity();
  rep.max_monotonicity_ratio = -std::numeric_limits<double>::infinity();
  const double lip_cap = coeffs.lipschitz * (1 + tol);
  const double l1_floor = coeffs.mono_l1 / (1 + tol);
  const double l2_cap = coeffs.mono_l2 * (1 + tol);

  const std::size_t n = mu.size();
  for (std::size_t a = 0; a < n; ++a) {
    const std::size_t ia = a / ys.size(), ja = a % ys.size();
    for (std::size_t c = a + 1; c < n; ++c) {
      const std::size_t ic = c / ys.size(), jc = c % ys.size();
      ++rep.pairs_checked;
      const double dp = std::abs(ps[ia] - ps[ic]);
      const double dy = std::abs(ys[ja] - ys[jc]);
      const double lip = std::abs(mu[a] - mu[c]) / (dp + dy);
      rep.max_lipschitz_ratio = std::max(rep.max_lipschitz_ratio, lip);
      if (lip > lip_cap)
        rep.violations.push_back({CoefficientViolation::Kind::lipschitz, ps[ia], ps[ic], ys[ja], ys[jc], lip});
      if (ia != ic) continue;
      // same p: (y - y')(mu(p, y') - mu(p, y)) / |y - y'|^2
      const double y = ys[ja], y2 = ys[jc];
      const double mono = (y - y2) * (mu[c] - mu[a]) / ((y - y2) * (y - y2));
      rep.min_monotonicity_ratio = std::min(rep.min_monotonicity_ratio, mono);
      rep.max_monotonicity_ratio = std::max(rep.max_monotonicity_ratio, mono);
      if (mono <= 0.0)
        rep.violations.push_back({CoefficientViolation::Kind::not_decreasing, ps[ia], ps[ia], y, y2, mono});
      else if (mono < l1_floor || mono > l2_cap)
        rep.violations.push_back({CoefficientViolation::Kind::monotonicity, ps[ia], ps[ia], y, y2, mono});
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

namespace presets {

CoefficientSet linear_abatement(double m0, double m1, double m2, double kappa, double sigma,
                                double rate) {
  if (!(m2 > 0.0)) throw ValidationError("linear-abatement preset needs m2 > 0");
  CoefficientSet c;
  c.name = "linear-abatement";
  c.dim_p = 1;
  c.drift = [kappa](double p) { return -kappa * p; };
  c.vol = [sigma](double) { return sigma; };
  c.emissions_rate = [m0, m1, m2](double p, double y) { return m0 + m1 * p - m2 * y; };
  c.rate_antiderivative = [m0, m1, m2](double p, double y) {
    return (m0 + m1 * p) * y - 0.5 * m2 * y * y;
  };
  c.rate_root = [m0, m1, m2](double p) { return (m0 + m1 * p) / m2; };
  c.lipschitz = std::max({std::abs(m1), m2, 1.0 / m2});
  c.mono_l1 = m2;
  c.mono_l2 = m2;
  c.rate = rate;
  c.check_constants();
  return c;
}

CoefficientSet no_factor(double m0, double m2, double rate) {
  if (!(m2 > 0.0)) throw ValidationError("no-factor preset needs m2 > 0");
  CoefficientSet c;
  c.name = "no-factor";
  c.dim_p = 0;
  c.emissions_rate = [m0, m2](double, double y) { return m0 - m2 * y; };
  c.rate_antiderivative = [m0, m2](double, double y) { return m0 * y - 0.5 * m2 * y * y; };
  c.rate_root = [m0, m2](double) { return m0 / m2; };
  c.lipschitz = std::max(m2, 1.0 / m2);
  c.mono_l1 = m2;
  c.mono_l2 = m2;
  c.rate = rate;
  c.check_constants();
  return c;
}

}  // namespace presets

}  // namespace carbon
