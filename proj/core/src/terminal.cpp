#include "carbon/terminal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

namespace {

constexpr std::array<double, 4> kGaussNodes = {-0.8611363115940526, -0.3399810435848563,
                                               0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
constexpr int kSubIntervals = 4;

template <class F>
double integrate(F&& f, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const double h = (hi - lo) / kSubIntervals;
  double sum = 0.0;
  for (int k = 0; k < kSubIntervals; ++k) {
    const double mid = lo + (k + 0.5) * h;
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g)
      sum += kGaussWeights[g] * f(mid + 0.5 * h * kGaussNodes[g]);
  }
  return 0.5 * h * sum;
}

}  // namespace

TerminalSurface::TerminalSurface(Fn below, JumpFn jump, double lipschitz_p, Representation rep,
                                 bool parametrized, std::string label)
    : below_(std::move(below)), jump_(std::move(jump)), lipschitz_p_(lipschitz_p), rep_(rep),
      parametrized_(parametrized), label_(std::move(label)) {
  if (!below_) throw ValidationError("terminal surface has no continuous part");
  if (!(lipschitz_p_ >= 0.0)) throw ValidationError("terminal Lipschitz constant must be >= 0");
}

TerminalSurface TerminalSurface::indicator(double level) {
  std::ostringstream os;
  os << "indicator(e >= " << level << ")";
  return TerminalSurface([](double, double, double) { return 0.0; },
                         [level](double) { return level; }, 0.0, Representation::closed_form,
                         false, os.str());
}

TerminalSurface TerminalSurface::indicator(const CapFunction& cap) {
  if (cap.is_constant()) return indicator(cap(0.0));
  return TerminalSurface([](double, double, double) { return 0.0; },
                         [cap](double q) { return cap(q); }, 0.0, Representation::closed_form,
                         true, "indicator(e >= Lambda(e_param))");
}

TerminalSurface TerminalSurface::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0)) throw ValidationError("terminal values must lie in [0, 1]");
  std::ostringstream os;
  os << "constant(" << value << ")";
  return TerminalSurface([value](double, double, double) { return value; }, nullptr, 0.0,
                         Representation::closed_form, false, os.str());
}

TerminalSurface TerminalSurface::closed_form(std::function<double(double, double)> f,
                                             double lipschitz_p, std::string label) {
  return TerminalSurface([f = std::move(f)](double p, double e, double) { return f(p, e); },
                         nullptr, lipschitz_p, Representation::closed_form, false,
                         std::move(label));
}

double TerminalSurface::operator()(double p, double e, double e_param) const {
  if (jump_ && e >= jump_(e_param)) return 1.0;
  return below_(p, e, e_param);
}

double TerminalSurface::cell_average(double p, double lo, double hi, double e_param) const {
  if (!(hi > lo)) throw ValidationError("cell_average needs hi > lo");
  const auto f = [&](double e) { return below_(p, e, e_param); };
  if (!jump_) return integrate(f, lo, hi) / (hi - lo);
  const double j = jump_(e_param);
  if (j <= lo) return 1.0;
  if (j >= hi) return integrate(f, lo, hi) / (hi - lo);
  return (integrate(f, lo, j) + (hi - j)) / (hi - lo);
}

TerminalSurface TerminalSurface::shifted(double x) const {
  Fn below = [b = below_, x](double p, double e, double q) { return b(p, e - x, q); };
  JumpFn jump = nullptr;
  if (jump_) jump = [j = jump_, x](double q) { return j(q) + x; };
  std::ostringstream os;
  os << label_ << " shifted by " << x;
  return TerminalSurface(std::move(below), std::move(jump), lipschitz_p_, rep_, parametrized_,
                         os.str());
}

TerminalCheck validate_terminal(const TerminalSurface& phi, const TerminalCheckBox& box,
                                double tol, double limit_tol) {
  if (box.n_e < 2 || !(box.e_hi > box.e_lo)) throw ValidationError("terminal check box is degenerate");
  TerminalCheck out;
  const int n_p = std::max(1, box.n_p);
  auto p_at = [&](int i) {
    return n_p == 1 ? box.p_lo : box.p_lo + (box.p_hi - box.p_lo) * i / (n_p - 1);
  };
  auto e_at = [&](int i) { return box.e_lo + (box.e_hi - box.e_lo) * i / (box.n_e - 1); };
  const std::vector<double> params =
      phi.parametrized() && !box.e_params.empty() ? box.e_params : std::vector<double>{0.0};

  for (double q : params) {
    std::vector<double> prev_row;
    double prev_p = 0.0;
    for (int ip = 0; ip < n_p; ++ip) {
      const double p = p_at(ip);
      std::vector<double> row(static_cast<std::size_t>(box.n_e));
      for (int ie = 0; ie < box.n_e; ++ie) {
        const double v = phi(p, e_at(ie), q);
        if (!std::isfinite(v)) throw ValidationError("terminal surface returned a non-finite value");
        row[ie] = v;
        if (v < -tol || v > 1.0 + tol) ++out.range_violations;
        if (ie > 0 && v < row[ie - 1] - tol) ++out.monotonicity_violations;
      }
      out.left_limit_residual = std::max(out.left_limit_residual, std::abs(row.front()));
      out.right_limit_residual = std::max(out.right_limit_residual, std::abs(1.0 - row.back()));
      if (!prev_row.empty()) {
        const double dp = p - prev_p;
        for (int ie = 0; ie < box.n_e; ++ie)
          out.observed_lipschitz_p =
              std::max(out.observed_lipschitz_p, std::abs(row[ie] - prev_row[ie]) / dp);
      }
      prev_row = std::move(row);
      prev_p = p;
    }
  }

  if (phi.parametrized() && params.size() >= 2) {
    std::vector<double> sorted = params;
    std::sort(sorted.begin(), sorted.end());
    for (int ip = 0; ip < n_p; ++ip) {
      const double p = p_at(ip);
      for (int ie = 0; ie < box.n_e; ++ie) {
        const double shift = e_at(ie);
        double prev = phi(p, shift + sorted.front(), sorted.front());
        for (std::size_t k = 1; k < sorted.size(); ++k) {
          const double v = phi(p, shift + sorted[k], sorted[k]);
          if (v < prev - tol) ++out.diagonal_monotonicity_violations;
          prev = v;
        }
      }
    }
  }

  out.lipschitz_ok = out.observed_lipschitz_p <= phi.lipschitz_p() * (1 + 1e-9) + tol;
  if (out.range_violations) out.notes.push_back("values outside [0, 1]");
  if (out.monotonicity_violations) out.notes.push_back("not non-decreasing in e");
  if (out.left_limit_residual > limit_tol) out.notes.push_back("does not reach 0 at the left edge");
  if (out.right_limit_residual > limit_tol) out.notes.push_back("does not reach 1 at the right edge");
  if (!out.lipschitz_ok) out.notes.push_back("Lipschitz-in-p constant exceeded");
  if (out.diagonal_monotonicity_violations)
    out.notes.push_back("e_param -> Phi(p, e + e_param, e_param) not non-decreasing");
  out.pass = out.notes.empty();
  return out;
}

}  // namespace carbon
