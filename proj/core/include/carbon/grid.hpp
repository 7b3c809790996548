#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace carbon {

/// One grid axis. Lookups are O(1) on uniform axes and O(log n) otherwise.
class Axis {
 public:
  Axis() = default;
  explicit Axis(std::vector<double> nodes);

  static Axis uniform(double first, double last, std::size_t n_nodes);

  std::size_t size() const noexcept { return nodes_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }
  double operator[](std::size_t i) const { return nodes_[i]; }
  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  bool is_uniform() const noexcept { return uniform_; }
  double spacing() const noexcept { return spacing_; }
  bool contains(double x, double tol = 1e-12) const;

  /// Bracketing cell of x: nodes (i, i+1) and weight w of node i+1. For a
  /// single-node axis returns (0, 0). Throws GridBoundsError outside.
  struct Bracket {
    std::size_t lo;
    double weight;
  };
  Bracket locate(double x, const char* axis_name) const;

 private:
  std::vector<double> nodes_;
  bool uniform_ = true;
  double spacing_ = 0.0;
};

struct GridMetadata {
  int period = 1;
  double t0 = 0.0;
  double tau = 1.0;
  double rate = 0.0;
  int dim_p = 0;
  std::string terminal_hash;
  std::string config_hash;
  std::string label;
};

/// Decoupling field sampled on a (t, p, e[, e_param]) mesh for one period.
///
/// Values are stored row-major in (t, p, e, e_param) order. The e axis holds
/// finite-volume cell centres; `e_face_lo()`/`e_face_hi()` are the outer cell
/// faces. The last time node is the terminal time tau and carries the
/// projected terminal data; every other time node is an interior slice.
/// For dim_p == 0 the p axis has the single node 0.
class ValueGrid {
 public:
  ValueGrid() = default;
  ValueGrid(Axis t, Axis p, Axis e, Axis e_param, GridMetadata meta);

  const Axis& t_axis() const noexcept { return t_; }
  const Axis& p_axis() const noexcept { return p_; }
  const Axis& e_axis() const noexcept { return e_; }
  const Axis& e_param_axis() const noexcept { return q_; }
  const GridMetadata& metadata() const noexcept { return meta_; }
  GridMetadata& metadata() noexcept { return meta_; }

  bool has_factor() const noexcept { return meta_.dim_p > 0; }
  bool has_param() const noexcept { return !q_.empty(); }
  std::size_t nt() const noexcept { return t_.size(); }
  std::size_t np() const noexcept { return p_.size(); }
  std::size_t ne() const noexcept { return e_.size(); }
  std::size_t nq() const noexcept { return q_.empty() ? 1 : q_.size(); }
  double de() const noexcept { return e_.spacing(); }
  double e_face_lo() const { return e_.front() - 0.5 * de(); }
  double e_face_hi() const { return e_.back() + 0.5 * de(); }
  /// Time of the last slice strictly before tau.
  double last_interior_time() const { return t_[t_.size() - 2]; }

  std::size_t index(std::size_t ti, std::size_t pi, std::size_t ei, std::size_t qi = 0) const {
    return ((ti * np() + pi) * ne() + ei) * nq() + qi;
  }
  double at(std::size_t ti, std::size_t pi, std::size_t ei, std::size_t qi = 0) const {
    return values_[index(ti, pi, ei, qi)];
  }
  double& at(std::size_t ti, std::size_t pi, std::size_t ei, std::size_t qi = 0) {
    return values_[index(ti, pi, ei, qi)];
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// Piecewise-multilinear interpolation. t must lie in [t0, tau); for
  /// t past the last interior slice the last interior slice is held. p is
  /// ignored when dim_p == 0 and e_param is ignored when the grid has no
  /// e_param axis. Exact at nodes. Out-of-range queries throw GridBoundsError.
  double evaluate(double t, double p, double e, double e_param = 0.0) const;

  /// Same interpolation restricted to stored time slice ti (which may be the
  /// terminal slice).
  double evaluate_slice(std::size_t ti, double p, double e, double e_param = 0.0) const;

  /// Index of the stored slice closest to t.
  std::size_t nearest_slice(double t) const;

 private:
  double interp_pe(std::size_t ti, double p, double e, double e_param) const;

  Axis t_, p_, e_, q_;
  GridMetadata meta_;
  std::vector<double> values_;
};

/// A single time slice of a ValueGrid, detached from the full field. Used for
/// period-start surfaces and for building linking terminal conditions.
class GridSlice {
 public:
  GridSlice() = default;
  static GridSlice from(const ValueGrid& grid, std::size_t ti);

  double t() const noexcept { return t_; }
  const Axis& p_axis() const noexcept { return p_; }
  const Axis& e_axis() const noexcept { return e_; }
  const Axis& e_param_axis() const noexcept { return q_; }
  bool has_factor() const noexcept { return dim_p_ > 0; }
  bool has_param() const noexcept { return !q_.empty(); }
  std::size_t np() const noexcept { return p_.size(); }
  std::size_t ne() const noexcept { return e_.size(); }
  std::size_t nq() const noexcept { return q_.empty() ? 1 : q_.size(); }
  double at(std::size_t pi, std::size_t ei, std::size_t qi = 0) const {
    return values_[(pi * ne() + ei) * nq() + qi];
  }
  std::span<const double> values() const noexcept { return values_; }

  /// Same bounds semantics as ValueGrid::evaluate.
  double evaluate(double p, double e, double e_param = 0.0) const;

 private:
  double t_ = 0.0;
  int dim_p_ = 0;
  Axis p_, e_, q_;
  std::vector<double> values_;
};

}  // namespace carbon
