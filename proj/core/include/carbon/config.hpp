#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "carbon/coefficients.hpp"
#include "carbon/infinite_period.hpp"
#include "carbon/market.hpp"
#include "carbon/montecarlo.hpp"
#include "carbon/solver.hpp"

namespace carbon {

/// Version of the defaults table compiled into the library.
inline constexpr int kConfigVersion = 1;

/// The built-in defaults table as JSON text (echoed into run manifests).
std::string defaults_table_json();

/// Fully resolved run configuration: the user's JSON tree merged over the
/// defaults table and turned into model objects.
///
/// Top-level keys: version, periods (integer or "infinite"), period_length,
/// period_ends, rate, penalty, initial {e, p}, cap {kind, parameters},
/// coefficients {preset, parameters | expression, dim_p, constants},
/// terminal {kind, parameters}, solver {...}, infinite {...},
/// simulation {...}. Unknown keys are rejected.
struct RunConfig {
  bool infinite = false;
  MarketSpec market;
  CoefficientSet coeffs;
  SolverConfig solver;
  PicardSettings picard;
  SimulationSettings simulation;
  std::string terminal_kind = "indicator";
  /// Canonical JSON of the resolved tree.
  std::string resolved_json;
  /// SHA-256 of the resolved tree without the simulation and thread settings.
  std::string config_hash;
  std::vector<std::string> warnings;

  /// Throws ValidationError for malformed or ill-posed configurations.
  static RunConfig from_text(const std::string& json_text);
  static RunConfig from_file(const std::filesystem::path& file);
};

}  // namespace carbon
