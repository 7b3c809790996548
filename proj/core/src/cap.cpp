#include "carbon/cap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

std::string to_string(CapKind kind) {
  switch (kind) {
    case CapKind::constant: return "constant";
    case CapKind::affine_allocation: return "affine-allocation";
    case CapKind::msr: return "msr";
    case CapKind::custom: return "custom";
  }
  return "custom";
}

CapKind cap_kind_from_string(const std::string& s) {
  if (s == "constant") return CapKind::constant;
  if (s == "affine-allocation") return CapKind::affine_allocation;
  if (s == "msr") return CapKind::msr;
  if (s == "custom") return CapKind::custom;
  throw ValidationError("unknown cap kind '" + s + "'");
}

std::string to_string(AllocationMode mode) {
  return mode == AllocationMode::banking_borrowing_withdrawal ? "banking-borrowing-withdrawal"
                                                              : "banking-withdrawal";
}

AllocationMode allocation_mode_from_string(const std::string& s) {
  if (s == "banking-borrowing-withdrawal") return AllocationMode::banking_borrowing_withdrawal;
  if (s == "banking-withdrawal") return AllocationMode::banking_withdrawal;
  throw ValidationError("unknown allocation mode '" + s + "'");
}

CapFunction::CapFunction(CapKind kind, std::function<double(double)> lambda,
                         bool constant_in_param)
    : kind_(kind), lambda_(std::move(lambda)), constant_(constant_in_param) {
  if (!lambda_) throw ValidationError("cap function is empty");
}

CapFunction CapFunction::constant(double level) {
  if (!std::isfinite(level)) throw ValidationError("constant cap must be finite");
  return CapFunction(CapKind::constant, [level](double) { return level; }, true);
}

CapFunction make_cap_allocation(const std::vector<double>& allocations, int k, int q,
                                AllocationMode mode) {
  if (q < 1 || k < 1 || k > q) {
    std::ostringstream os;
    os << "allocation cap needs 1 <= k <= q (k=" << k << ", q=" << q << ")";
    throw ValidationError(os.str());
  }
  const int upto = mode == AllocationMode::banking_borrowing_withdrawal ? std::min(k + 1, q) : k;
  if (static_cast<int>(allocations.size()) < std::min(k + 1, q)) {
    std::ostringstream os;
    os << "allocation list has " << allocations.size() << " entries, need at least "
       << std::min(k + 1, q);
    throw ValidationError(os.str());
  }
  for (double c : allocations)
    if (!(c >= 0.0)) throw ValidationError("allocations must be non-negative");
  const double level = std::accumulate(allocations.begin(), allocations.begin() + upto, 0.0);
  return CapFunction(CapKind::affine_allocation, [level](double) { return level; }, true);
}

CapFunction make_cap_msr(const MsrParameters& m) {
  if (!(m.kappa_low < m.kappa_high)) throw ValidationError("msr cap needs kappa_low < kappa_high");
  if (!(m.top_up > 0.0)) throw ValidationError("msr cap needs top-up c > 0");
  if (!(m.retain_fraction > 0.0 && m.retain_fraction < 1.0))
    throw ValidationError("msr cap needs 0 < alpha < 1");
  if (!(m.c1 >= 0.0 && m.c2 >= 0.0)) throw ValidationError("msr allocations must be non-negative");
  auto lambda = [m](double x) {
    const double circulating = m.c1 + m.c2 - x;
    double gamma = circulating;
    if (circulating < m.kappa_low)
      gamma = circulating + m.top_up;
    else if (circulating > m.kappa_high)
      gamma = m.retain_fraction * circulating;
    return gamma + x;
  };
  return CapFunction(CapKind::msr, lambda, false);
}

CapValidation validate_cap(const CapFunction& cap, double lo, double hi, int n_samples,
                           double threshold) {
  if (!(hi > lo) || n_samples < 2) throw ValidationError("cap validation grid is degenerate");
  CapValidation out;
  double prev = cap.slack(lo);
  for (int i = 1; i < n_samples; ++i) {
    const double x = lo + (hi - lo) * i / (n_samples - 1);
    const double g = cap.slack(x);
    if (!std::isfinite(g)) throw ValidationError("cap function returned a non-finite value");
    if (g > prev) {
      out.max_increase = std::max(out.max_increase, g - prev);
      if (out.warnings.size() < 16) {
        std::ostringstream os;
        os << "Gamma increases by " << g - prev << " near e=" << x;
        out.warnings.push_back(os.str());
      }
    }
    prev = g;
  }
  out.gamma_at_right_edge = prev;
  if (out.max_increase > 0.0) out.in_theta = false;
  if (!(prev < threshold)) {
    out.in_theta = false;
    std::ostringstream os;
    os << "Gamma at the right edge (" << prev << ") is not below " << threshold;
    out.warnings.push_back(os.str());
  }
  return out;
}

}  // namespace carbon
