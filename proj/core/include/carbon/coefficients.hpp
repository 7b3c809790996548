#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carbon {

/// Forward dynamics of the market: factor drift b, factor volatility sigma
/// and emissions rate mu(p, y), together with the structural constants the
/// user declares for them.
///
/// The reference solvers support dim_p in {0, 1}. With dim_p == 0 the factor
/// process is absent and drift/vol are ignored; mu is then called with p = 0.
struct CoefficientSet {
  using ScalarFn = std::function<double(double)>;
  using RateFn = std::function<double(double, double)>;

  std::string name = "custom";
  int dim_p = 0;
  ScalarFn drift;          // b(p)
  ScalarFn vol;            // sigma(p)
  RateFn emissions_rate;   // mu(p, y), tonnes per unit time
  /// Optional closed form of M(p, y) = int_0^y mu(p, u) du. When absent the
  /// flux falls back to adaptive quadrature.
  RateFn rate_antiderivative;
  /// Optional closed form of the root y* of mu(p, .) = 0.
  ScalarFn rate_root;

  double lipschitz = 1.0;  // L
  double mono_l1 = 1.0;
  double mono_l2 = 1.0;
  double rate = 0.0;       // r, per unit time

  double mu(double p, double y) const { return emissions_rate(p, y); }
  double b(double p) const { return (dim_p == 0 || !drift) ? 0.0 : drift(p); }
  double sigma(double p) const { return (dim_p == 0 || !vol) ? 0.0 : vol(p); }

  /// Throws ValidationError when the declared constants are inconsistent
  /// (L <= 0, not 1/L <= l1 <= l2 <= L, r < 0, dim_p < 0, missing mu).
  void check_constants() const;
};

struct SampleBox {
  double p_lo = 0.0;
  double p_hi = 0.0;
  double y_lo = 0.0;
  double y_hi = 1.0;
};

struct CoefficientViolation {
  enum class Kind { lipschitz, monotonicity, not_decreasing };
  Kind kind;
  double p;
  double p2;
  double y;
  double y2;
  double ratio;
};

struct ValidationReport {
  bool pass = true;
  double max_lipschitz_ratio = 0.0;
  double min_monotonicity_ratio = 0.0;
  double max_monotonicity_ratio = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<CoefficientViolation> violations;

  std::string summary() const;
};

/// Sampled check of the Lipschitz and monotonicity assumptions on mu over a
/// regular n_samples x n_samples lattice of (p, y) pairs. Every pair of
/// lattice points is compared. Non-finite outputs of mu/b/sigma throw.
ValidationReport validate_coefficients(const CoefficientSet& coeffs,
                                       const SampleBox& box, int n_samples,
                                       double tol = 1e-9);

namespace presets {

/// mu(p, y) = m0 + m1 p - m2 y with an Ornstein-Uhlenbeck factor
/// dP = -kappa P dt + sigma dW. Declared constants l1 = l2 = m2 and
/// L = max(m1, m2, 1/m2).
CoefficientSet linear_abatement(double m0, double m1, double m2, double kappa,
                                double sigma, double rate);

/// d = 0 with mu(y) = m0 - m2 y.
CoefficientSet no_factor(double m0, double m2, double rate);

}  // namespace presets

}  // namespace carbon
