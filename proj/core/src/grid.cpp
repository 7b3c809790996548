#include "carbon/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "carbon/error.hpp"

namespace carbon {

Axis::Axis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (!(nodes_[i] > nodes_[i - 1])) throw ValidationError("axis nodes must be strictly increasing");
  if (nodes_.size() >= 2) {
    spacing_ = (nodes_.back() - nodes_.front()) / static_cast<double>(nodes_.size() - 1);
    for (std::size_t i = 1; i < nodes_.size() && uniform_; ++i)
      uniform_ = std::abs((nodes_[i] - nodes_[i - 1]) - spacing_) <= 1e-9 * spacing_;
  }
}

Axis Axis::uniform(double first, double last, std::size_t n_nodes) {
  std::vector<double> nodes(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i)
    nodes[i] = n_nodes == 1 ? first
                            : first + (last - first) * static_cast<double>(i) /
                                          static_cast<double>(n_nodes - 1);
  return Axis(std::move(nodes));
}

bool Axis::contains(double x, double tol) const {
  if (nodes_.empty()) return false;
  const double scale = std::max(1.0, std::max(std::abs(front()), std::abs(back())));
  return x >= front() - tol * scale && x <= back() + tol * scale;
}

Axis::Bracket Axis::locate(double x, const char* axis_name) const {
  if (nodes_.size() <= 1) return {0, 0.0};
  if (!contains(x)) {
    std::ostringstream os;
    os << axis_name << "=" << x << " outside grid [" << front() << ", " << back() << "]";
    throw GridBoundsError(os.str());
  }
  const std::size_t last = nodes_.size() - 2;
  std::size_t i;
  if (uniform_) {
    const double s = (x - front()) / spacing_;
    i = s <= 0.0 ? 0 : std::min(static_cast<std::size_t>(s), last);
  } else {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    i = it == nodes_.begin() ? 0 : std::min(static_cast<std::size_t>(it - nodes_.begin()) - 1, last);
  }
  double w = (x - nodes_[i]) / (nodes_[i + 1] - nodes_[i]);
  w = std::clamp(w, 0.0, 1.0);
  return {i, w};
}

ValueGrid::ValueGrid(Axis t, Axis p, Axis e, Axis e_param, GridMetadata meta)
    : t_(std::move(t)), p_(std::move(p)), e_(std::move(e)), q_(std::move(e_param)),
      meta_(std::move(meta)) {
  if (t_.size() < 2) throw ValidationError("value grid needs at least one interior and the terminal slice");
  if (e_.size() < 2 || !e_.is_uniform()) throw ValidationError("value grid needs a uniform e axis");
  if (p_.empty()) p_ = Axis(std::vector<double>{0.0});
  if (meta_.dim_p == 0 && p_.size() != 1) throw ValidationError("dim_p = 0 grid must have a single p node");
  if (meta_.dim_p > 0 && p_.size() < 2) throw ValidationError("factor grid needs at least two p nodes");
  values_.assign(nt() * np() * ne() * nq(), 0.0);
}

namespace {

double interpolate_slice(const double* base, const Axis& p_ax, const Axis& e_ax, const Axis& q_ax,
                         bool factor, double p, double e, double e_param) {
  const std::size_t np = p_ax.size(), ne = e_ax.size(), nq = q_ax.empty() ? 1 : q_ax.size();
  const auto be = e_ax.locate(e, "e");
  const auto bp = factor ? p_ax.locate(p, "p") : Axis::Bracket{0, 0.0};
  const auto bq = nq > 1 ? q_ax.locate(e_param, "e_param") : Axis::Bracket{0, 0.0};
  const std::size_t p_hi = np > 1 ? bp.lo + 1 : bp.lo;
  const std::size_t q_hi = nq > 1 ? bq.lo + 1 : bq.lo;
  auto val = [&](std::size_t pi, std::size_t ei, std::size_t qi) { return base[(pi * ne + ei) * nq + qi]; };
  auto along_q = [&](std::size_t pi, std::size_t ei) {
    const double a = val(pi, ei, bq.lo);
    return bq.weight == 0.0 ? a : a + bq.weight * (val(pi, ei, q_hi) - a);
  };
  auto along_e = [&](std::size_t pi) {
    const double a = along_q(pi, be.lo);
    return be.weight == 0.0 ? a : a + be.weight * (along_q(pi, be.lo + 1) - a);
  };
  const double a = along_e(bp.lo);
  return bp.weight == 0.0 ? a : a + bp.weight * (along_e(p_hi) - a);
}

}  // namespace

double ValueGrid::interp_pe(std::size_t ti, double p, double e, double e_param) const {
  return interpolate_slice(values_.data() + ti * np() * ne() * nq(), p_, e_, q_, has_factor(), p, e,
                           e_param);
}

double ValueGrid::evaluate_slice(std::size_t ti, double p, double e, double e_param) const {
  if (ti >= nt()) throw GridBoundsError("time slice index out of range");
  return interp_pe(ti, p, e, e_param);
}

double ValueGrid::evaluate(double t, double p, double e, double e_param) const {
  const double tol = 1e-12 * std::max(1.0, std::abs(t_.back()));
  if (t < t_.front() - tol || t >= t_.back()) {
    std::ostringstream os;
    os << "t=" << t << " outside [" << t_.front() << ", " << t_.back() << ")";
    throw GridBoundsError(os.str());
  }
  const std::size_t last_interior = nt() - 2;
  if (t >= t_[last_interior]) return interp_pe(last_interior, p, e, e_param);
  std::size_t i;
  if (t_.is_uniform()) {
    i = std::min(static_cast<std::size_t>(std::max(0.0, (t - t_.front()) / t_.spacing())),
                 last_interior - 1);
  } else {
    auto it = std::upper_bound(t_.nodes().begin(), t_.nodes().end(), t);
    i = it == t_.nodes().begin() ? 0 : static_cast<std::size_t>(it - t_.nodes().begin()) - 1;
    i = std::min(i, last_interior - 1);
  }
  const double w = std::clamp((t - t_[i]) / (t_[i + 1] - t_[i]), 0.0, 1.0);
  const double a = interp_pe(i, p, e, e_param);
  if (w == 0.0) return a;
  return a + w * (interp_pe(i + 1, p, e, e_param) - a);
}

std::size_t ValueGrid::nearest_slice(double t) const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < nt(); ++i)
    if (std::abs(t_[i] - t) < std::abs(t_[best] - t)) best = i;
  return best;
}

GridSlice GridSlice::from(const ValueGrid& grid, std::size_t ti) {
  if (ti >= grid.nt()) throw GridBoundsError("slice index out of range");
  GridSlice s;
  s.t_ = grid.t_axis()[ti];
  s.dim_p_ = grid.metadata().dim_p;
  s.p_ = grid.p_axis();
  s.e_ = grid.e_axis();
  s.q_ = grid.e_param_axis();
  const std::size_t n = grid.np() * grid.ne() * grid.nq();
  const auto all = grid.values();
  s.values_.assign(all.begin() + static_cast<std::ptrdiff_t>(ti * n),
                   all.begin() + static_cast<std::ptrdiff_t>((ti + 1) * n));
  return s;
}

double GridSlice::evaluate(double p, double e, double e_param) const {
  return interpolate_slice(values_.data(), p_, e_, q_, has_factor(), p, e, e_param);
}

}  // namespace carbon
