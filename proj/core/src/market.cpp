#include "carbon/market.hpp"

#include <cmath>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

MarketSpec MarketSpec::finite(std::vector<double> period_ends, std::vector<CapFunction> caps,
                              double rate) {
  MarketSpec s;
  s.period_ends = std::move(period_ends);
  s.caps = std::move(caps);
  s.rate = rate;
  s.check();
  return s;
}

MarketSpec MarketSpec::finite_uniform(int q, double tau, std::vector<CapFunction> caps,
                                      double rate) {
  if (q < 1) throw ValidationError("number of periods must be >= 1");
  std::vector<double> ends(static_cast<std::size_t>(q));
  for (int k = 0; k < q; ++k) ends[k] = tau * (k + 1);
  return finite(std::move(ends), std::move(caps), rate);
}

MarketSpec MarketSpec::constant_caps(int q, double tau, double lambda, double rate) {
  std::vector<CapFunction> caps;
  for (int k = 1; k <= q; ++k) caps.push_back(CapFunction::constant(k * lambda));
  auto s = finite_uniform(q, tau, std::move(caps), rate);
  s.period_length = tau;
  s.per_period_cap = lambda;
  return s;
}

MarketSpec MarketSpec::infinite_market(double tau, double lambda, double rate) {
  MarketSpec s;
  s.infinite = true;
  s.period_length = tau;
  s.per_period_cap = lambda;
  s.rate = rate;
  s.check();
  return s;
}

bool MarketSpec::all_caps_constant() const {
  for (const auto& c : caps)
    if (!c.is_constant()) return false;
  return true;
}

TerminalSurface MarketSpec::final_condition() const {
  if (final_terminal) return *final_terminal;
  if (infinite) return TerminalSurface::indicator(per_period_cap);
  return TerminalSurface::indicator(caps.back());
}

void MarketSpec::check() const {
  if (penalty != 1.0) throw ValidationError("only penalty = 1 is supported");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw ValidationError("rate must be finite and >= 0");
  if (infinite) {
    if (!(period_length > 0.0)) throw ValidationError("period length tau must be positive");
    if (!(per_period_cap > 0.0)) throw ValidationError("per-period cap lambda must be positive");
    return;
  }
  if (period_ends.empty()) throw ValidationError("a finite market needs at least one period");
  if (caps.size() != period_ends.size()) {
    std::ostringstream os;
    os << "market has " << period_ends.size() << " compliance dates but " << caps.size() << " caps";
    throw ValidationError(os.str());
  }
  double prev = 0.0;
  for (double t : period_ends) {
    if (!(t > prev)) throw ValidationError("compliance dates must be strictly increasing and > 0");
    prev = t;
  }
}

}  // namespace carbon
