#pragma once

#include <optional>
#include <vector>

#include "carbon/cap.hpp"
#include "carbon/terminal.hpp"

namespace carbon {

/// Market design: compliance dates, caps and the final terminal condition.
///
/// Finite markets have q >= 1 compliance dates T_1 < ... < T_q with one cap
/// per date (T_0 = 0). Infinite markets repeat a period of length tau with
/// cap lambda per period, so T_k = k tau and Lambda_k = k lambda.
struct MarketSpec {
  bool infinite = false;
  std::vector<double> period_ends;
  std::vector<CapFunction> caps;
  double rate = 0.0;
  /// Reserved; only 1 is accepted.
  double penalty = 1.0;
  /// Defaults to theta(p, e, e_param) = 1_{e >= Lambda_q(e_param)}.
  std::optional<TerminalSurface> final_terminal;
  double period_length = 1.0;   // tau (infinite markets)
  double per_period_cap = 1.0;  // lambda (infinite markets)
  double initial_emissions = 0.0;
  double initial_factor = 0.0;

  static MarketSpec finite(std::vector<double> period_ends, std::vector<CapFunction> caps,
                           double rate);
  static MarketSpec finite_uniform(int q, double tau, std::vector<CapFunction> caps,
                                   double rate);
  /// Constant caps Lambda_k = k lambda on T_k = k tau, k = 1..q.
  static MarketSpec constant_caps(int q, double tau, double lambda, double rate);
  static MarketSpec infinite_market(double tau, double lambda, double rate);

  int num_periods() const { return static_cast<int>(period_ends.size()); }
  double period_start(int k) const { return k <= 1 ? 0.0 : period_ends[k - 2]; }
  double period_end(int k) const { return period_ends[k - 1]; }
  const CapFunction& cap(int k) const { return caps[k - 1]; }
  bool all_caps_constant() const;
  TerminalSurface final_condition() const;

  /// Throws ValidationError on inconsistent specs.
  void check() const;
};

}  // namespace carbon
