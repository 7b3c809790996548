#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/grid.hpp"
#include "carbon/linking.hpp"
#include "carbon/market.hpp"
#include "carbon/solver.hpp"

namespace carbon {

/// Decoupling field of a q-period market: one ValueGrid per period k
/// covering [T_{k-1}, T_k], solved backward from the final terminal
/// condition through the linking conditions Phi^{q,k}.
class MultiPeriodField {
 public:
  MultiPeriodField(MarketSpec spec, std::vector<ValueGrid> grids,
                   std::vector<TerminalSurface> terminals,
                   std::vector<std::optional<DiagonalRange>> reach);

  const MarketSpec& spec() const noexcept { return spec_; }
  int num_periods() const noexcept { return static_cast<int>(grids_.size()); }
  /// 1-based period index.
  const ValueGrid& period(int k) const { return grids_.at(static_cast<std::size_t>(k - 1)); }
  /// Terminal condition period k was solved against (Phi^{q,k}; theta for k = q).
  const TerminalSurface& terminal(int k) const { return terminals_.at(static_cast<std::size_t>(k - 1)); }
  /// Reachable range of the previous compliance reading for period k, when
  /// the period carries an e_param axis.
  const std::optional<DiagonalRange>& reach(int k) const { return reach_.at(static_cast<std::size_t>(k - 1)); }

  /// Period containing t: T_{k-1} <= t < T_k.
  int period_at(double t) const;
  /// v^q(t, p, e, e_param) with e_param = E_{T_{k-1}} for the period holding t.
  double evaluate(double t, double p, double e, double e_param = 0.0) const;

 private:
  MarketSpec spec_;
  std::vector<ValueGrid> grids_;
  std::vector<TerminalSurface> terminals_;
  std::vector<std::optional<DiagonalRange>> reach_;
};

/// Reachable interval of E_{T_{k-1}} from the initial reading, using
/// min/max of mu over y in [0, 1] and the p-grid.
DiagonalRange reachable_readings(const MarketSpec& spec, const CoefficientSet& coeffs,
                                 const SolverConfig& config, int k);

/// Backward induction over the periods. Constant caps skip the e_param axis;
/// a period with a non-constant cap is solved once per e_param node, with
/// the e_param axis made of e-grid centres covering the reachable readings.
/// Solver errors are rethrown with the period index attached.
MultiPeriodField solve_multi_period(const MarketSpec& spec, const CoefficientSet& coeffs,
                                    const SolverConfig& config);

struct TranslationResidual {
  int k = 0;
  double sup_residual = 0.0;
  std::size_t nodes_compared = 0;
};

/// sup |v^q(T_k, p, e) - v^{q-1}(T_{k-1}, p, e - lambda)| for k = 1..q-1 over
/// the nodes of v^q whose shifted point lies inside the v^{q-1} grid. Both
/// fields must have constant caps Lambda_k = k lambda on T_k = k tau.
std::vector<TranslationResidual> translation_check(const MultiPeriodField& field_q,
                                                   const MultiPeriodField& field_qm1,
                                                   double lambda);

/// v^q(T_k, ., .[, .]) for 0 <= k < q.
GridSlice period_start_slice(const MultiPeriodField& field, int k);

struct FieldManifest {
  std::string spec_file;
  std::string spec_hash;
  std::vector<std::string> grid_files;
  std::map<std::string, std::string> hashes;
};

/// Directory layout: spec.json (the caller's spec text), period_<k>.grid per
/// period, manifest.json with SHA-256 of every file.
void write_field_directory(const MultiPeriodField& field, const std::filesystem::path& dir,
                           const std::string& spec_text);

using NamedGrid = std::pair<std::string, const ValueGrid*>;

/// Same layout for an arbitrary list of grids (used for the infinite-period w).
void write_grid_directory(const std::vector<NamedGrid>& grids, const std::filesystem::path& dir,
                          const std::string& spec_text);

struct StoredField {
  std::string spec_text;
  std::vector<ValueGrid> grids;
  FieldManifest manifest;
};

/// Reads a field directory. With `check_hashes`, throws FormatError on any
/// mismatch between the manifest and the files on disk.
StoredField read_field_directory(const std::filesystem::path& dir, bool check_hashes = true);

/// Files whose hash differs from the manifest (empty when pristine).
std::vector<std::string> hash_mismatches(const std::filesystem::path& dir);

}  // namespace carbon
