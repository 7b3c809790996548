#pragma once

#include <functional>
#include <string>
#include <vector>

namespace carbon {

enum class CapKind { constant, affine_allocation, msr, custom };

std::string to_string(CapKind kind);
CapKind cap_kind_from_string(const std::string& s);

enum class AllocationMode { banking_borrowing_withdrawal, banking_withdrawal };

std::string to_string(AllocationMode mode);
AllocationMode allocation_mode_from_string(const std::string& s);

/// Cumulative-emissions cap at a compliance date as a function of the
/// emissions reading at the previous compliance date:
///   e_param -> Lambda(e_param),   Gamma(e_param) = Lambda(e_param) - e_param.
class CapFunction {
 public:
  CapFunction(CapKind kind, std::function<double(double)> lambda, bool constant_in_param);

  static CapFunction constant(double level);

  double operator()(double e_param) const { return lambda_(e_param); }
  /// Allowances in circulation for the period: Gamma = Lambda - e_param.
  double slack(double e_param) const { return lambda_(e_param) - e_param; }

  CapKind kind() const noexcept { return kind_; }
  bool is_constant() const noexcept { return constant_; }

 private:
  CapKind kind_;
  std::function<double(double)> lambda_;
  bool constant_;
};

/// Banking / borrowing / withdrawal cap for compliance date k of q (1-based):
///   mode banking_borrowing_withdrawal: Gamma_k(x) = sum_{i <= min(k+1, q)} c_i - x
///   mode banking_withdrawal:           Gamma_k(x) = sum_{i <= k} c_i - x
/// so Lambda_k is constant in x.
CapFunction make_cap_allocation(const std::vector<double>& allocations, int k, int q,
                                AllocationMode mode);

struct MsrParameters {
  double c1 = 0.0;
  double c2 = 0.0;
  double kappa_low = 0.0;
  double kappa_high = 0.0;
  double top_up = 0.0;           // c
  double retain_fraction = 1.0;  // alpha
};

/// Period-2 cap of the two-period market stability reserve. With
/// G(x) = c1 + c2 - x the circulating volume before adjustment,
///   Gamma_2(x) = G + c      if G < kappa_low
///              = G          if kappa_low <= G <= kappa_high
///              = alpha G    if G > kappa_high
/// and Lambda_2(x) = Gamma_2(x) + x, where x is the reading at the first
/// compliance date.
CapFunction make_cap_msr(const MsrParameters& params);

struct CapValidation {
  bool in_theta = true;
  /// Largest increase of Gamma between consecutive validation nodes (0 when
  /// Gamma is non-increasing).
  double max_increase = 0.0;
  double gamma_at_right_edge = 0.0;
  std::vector<std::string> warnings;
};

/// Sampled membership check for the admissible cap class: Gamma must be
/// non-increasing on [lo, hi] and fall below `threshold` at the right edge.
/// Advisory only; construction never depends on it.
CapValidation validate_cap(const CapFunction& cap, double lo, double hi, int n_samples,
                           double threshold);

}  // namespace carbon
