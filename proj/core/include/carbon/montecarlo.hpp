#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"
#include "carbon/market.hpp"
#include "carbon/multi_period.hpp"

namespace carbon {

enum class JumpBranch { below, above, at };

std::string to_string(JumpBranch branch);

/// What happened to one path at compliance date T_k.
struct JumpRecord {
  std::uint64_t path = 0;
  int k = 0;
  double e_at_date = 0.0;  // E_{T_k}
  double cap = 0.0;        // Lambda_k(E_{T_{k-1}})
  double y_left = 0.0;     // Y_{T_k-}
  double y_right = 0.0;    // Y_{T_k}
  /// Spacing of the e-grid the left limit was read from.
  double de = 0.0;
  JumpBranch branch = JumpBranch::below;
};

struct SimulationSettings {
  std::uint64_t n_paths = 10'000;
  int steps_per_period = 512;
  std::uint64_t seed = 0;
  /// Keep every record_every-th Euler node (period ends are always kept).
  int record_every = 64;
  int threads = 0;
  /// Number of periods to simulate for an infinite market.
  int periods = 1;
};

/// Monte Carlo paths of (P, E, Y) on a recorded time mesh. Values are stored
/// row-major by (path, time node). Y at a compliance date node is the
/// right value Y_{T_k}; the left limit lives in the jump records.
struct PathBundle {
  std::uint64_t n_paths = 0;
  int dim_p = 0;
  double rate = 0.0;
  std::uint64_t seed = 0;
  int steps_per_period = 0;
  int record_every = 0;
  std::string rng = "philox4x32-10/box-muller";
  std::vector<double> period_ends;
  std::vector<double> times;
  std::vector<double> P;
  std::vector<double> E;
  std::vector<double> Y;
  std::vector<std::uint8_t> aborted;
  std::vector<std::string> abort_reasons;
  std::vector<JumpRecord> events;
  std::vector<std::string> warnings;

  std::size_t n_times() const { return times.size(); }
  std::size_t index(std::uint64_t path, std::size_t ti) const { return path * times.size() + ti; }
  std::uint64_t n_aborted() const;
  /// Recorded time node matching t; throws ValidationError if t is not on the mesh.
  std::size_t time_index(double t) const;
  /// Whether the path has a nondecreasing E (recorded, not asserted).
  bool emissions_nondecreasing(std::uint64_t path) const;
};

/// Simulates against a multi-period field. The field's spec supplies E_0, P_0
/// and the compliance dates. Throws SolverError if more than 0.1% of paths
/// leave the grid.
PathBundle simulate(const MultiPeriodField& field, const CoefficientSet& coeffs,
                    const SimulationSettings& settings);

/// Simulates the infinite market with Y_t = w(t - T_{k-1}, P_t, E_t - Lambda_{k-1}).
PathBundle simulate(const ValueGrid& w, const MarketSpec& spec, const CoefficientSet& coeffs,
                    const SimulationSettings& settings);

/// Deterministic pairwise summation in index order.
double pairwise_sum(std::span<const double> x);

struct MartingaleReport {
  double t1 = 0.0;
  double t2 = 0.0;
  double mean_t1 = 0.0;
  double mean_t2 = 0.0;
  double delta = 0.0;
  double standard_error = 0.0;
  std::uint64_t paths_used = 0;
  bool uses_left_limit = false;
  bool pass = false;
};

/// Compares mean(e^{-r t2} Y_{t2}) with mean(e^{-r t1} Y_{t1}). A compliance
/// date may coincide with t2, in which case the left limit is used; dates
/// strictly inside (t1, t2) are rejected. Passes iff |delta| <= 3 SE, with an
/// absolute floor of `abs_tol` for deterministic bundles.
MartingaleReport martingale_test(const PathBundle& bundle, double t1, double t2,
                                 double abs_tol = 1e-12);

struct JumpReport {
  int k = 0;
  std::uint64_t n_above = 0;
  std::uint64_t n_below = 0;
  std::uint64_t n_at_cap = 0;
  /// max |Y_{T_k-} - 1| over paths above the cap by the margin
  double above_residual = 0.0;
  /// max |Y_{T_k-} - Y_{T_k}| over paths below the cap by the margin
  double below_residual = 0.0;
  /// Within the margin: smallest and largest Y_{T_k-} (no pass/fail)
  double at_cap_min_left = 0.0;
  double at_cap_max_left = 0.0;
};

/// Trichotomy check per compliance date over paths clear of the cap by at
/// least margin_cells grid cells.
std::vector<JumpReport> jump_consistency_test(const PathBundle& bundle, double margin_cells);

/// CSV with columns path,t,P,E,Y (P omitted for dim_p = 0).
void write_paths_csv(const PathBundle& bundle, const std::filesystem::path& file);
/// CSV with columns path,k,E_Tk,cap,Y_left,Y_right,branch.
void write_events_csv(const PathBundle& bundle, const std::filesystem::path& file);

}  // namespace carbon
