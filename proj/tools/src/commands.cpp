#include "carbon_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include <json.hpp>

#include "carbon/config.hpp"
#include "carbon/diagnostics.hpp"
#include "carbon/error.hpp"
#include "carbon/grid_io.hpp"
#include "carbon/infinite_period.hpp"
#include "carbon/montecarlo.hpp"
#include "carbon/multi_period.hpp"
#include "carbon_cli/artifacts.hpp"

namespace carbon::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int fail(int code, const std::string& what) {
  std::cerr << "error: " << what << '\n';
  return code;
}

/// Loads the configuration and applies command-line overrides.
RunConfig load_config(const Options& opts) {
  RunConfig rc = RunConfig::from_file(opts.config);
  if (opts.threads) {
    rc.solver.threads = *opts.threads;
    rc.simulation.threads = *opts.threads;
  }
  if (opts.seed) rc.simulation.seed = *opts.seed;
  if (opts.paths) rc.simulation.n_paths = *opts.paths;
  for (const auto& w : rc.warnings) std::cerr << "warning: " << w << '\n';
  return rc;
}

/// finite doubles only; JSON has no representation for inf/nan
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json diagnostics_json(const DiagnosticsReport& d, std::size_t max_slices = 33) {
  json j;
  j["hard_invariants_pass"] = d.hard_invariants_pass();
  j["monotonicity_violations"] = d.monotonicity_violations;
  j["range_violations"] = d.range_violations;
  j["lipschitz_violations"] = d.lipschitz_violations;
  j["worst_lipschitz_ratio"] = num(d.worst_lipschitz_ratio);
  json slices = json::array();
  const std::size_t stride = std::max<std::size_t>(1, d.slices.size() / max_slices);
  for (std::size_t i = 0; i < d.slices.size(); i += stride) {
    const auto& s = d.slices[i];
    slices.push_back({{"t", s.t},
                      {"max_e_quotient", num(s.max_e_quotient)},
                      {"e_lipschitz_bound", num(s.e_lipschitz_bound)},
                      {"left_boundary_value", num(s.left_boundary_value)},
                      {"right_limit_residual", num(s.right_limit_residual)},
                      {"left_tail_integral", num(s.left_tail_integral)}});
  }
  j["slices"] = slices;
  return j;
}

void print_diagnostics(const std::string& label, const DiagnosticsReport& d) {
  std::cout << label << ": " << d.summary() << '\n';
}

}  // namespace

int cmd_price_multi(const Options& opts) {
  const auto start = Clock::now();
  RunConfig rc;
  try {
    rc = load_config(opts);
  } catch (const Error& e) {
    return fail(kConfigError, e.what());
  }
  if (rc.infinite) return fail(kConfigError, "infinite-period configuration; use price-infinite");
  if (opts.verify_only) {
    std::cout << "configuration ok, hash " << rc.config_hash << '\n';
    return kOk;
  }

  std::optional<MultiPeriodField> field;
  try {
    field.emplace(solve_multi_period(rc.market, rc.coeffs, rc.solver));
  } catch (const ValidationError& e) {
    return fail(kConfigError, e.what());
  } catch (const Error& e) {
    return fail(kSolverFailure, e.what());
  }

  RunManifest manifest;
  manifest.command = "price-multi";
  manifest.config_hash = rc.config_hash;
  manifest.code_version = CARBON_VERSION;

  json diag;
  bool hard_ok = true;
  for (int k = 1; k <= field->num_periods(); ++k) {
    const DiagnosticsReport d = diagnostics(field->period(k), rc.coeffs);
    print_diagnostics("period " + std::to_string(k), d);
    hard_ok = hard_ok && d.hard_invariants_pass();
    diag["period_" + std::to_string(k)] = diagnostics_json(d);
    manifest.verification["period_" + std::to_string(k) + "_hard_invariants"] = d.hard_invariants_pass();
  }

  const fs::path field_dir = opts.out / "field";
  write_field_directory(*field, field_dir, rc.resolved_json);
  write_text(opts.out / "diagnostics.json", diag.dump(2) + "\n");
  for (const auto& f : {"spec.json", "manifest.json"}) manifest.add_artifact(opts.out, field_dir / f);
  for (int k = 1; k <= field->num_periods(); ++k)
    manifest.add_artifact(opts.out, field_dir / ("period_" + std::to_string(k) + ".grid"));
  manifest.add_artifact(opts.out, opts.out / "diagnostics.json");

  manifest.exit_code = hard_ok ? kOk : kInvariantFailure;
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(opts.out);
  std::cout << "wrote " << field_dir.string() << '\n';
  return manifest.exit_code;
}

int cmd_price_infinite(const Options& opts) {
  const auto start = Clock::now();
  RunConfig rc;
  try {
    rc = load_config(opts);
  } catch (const Error& e) {
    return fail(kConfigError, e.what());
  }
  if (!rc.infinite) return fail(kConfigError, "finite-period configuration; use price-multi");
  if (opts.verify_only) {
    std::cout << "configuration ok, hash " << rc.config_hash << '\n';
    return kOk;
  }

  InfiniteSolution sol;
  try {
    sol = solve_infinite(rc.coeffs, rc.picard, rc.solver);
  } catch (const ValidationError& e) {
    return fail(kConfigError, e.what());
  } catch (const Error& e) {
    return fail(kSolverFailure, e.what());
  }
  const PicardState& cert = sol.certificate;
  for (const auto& w : cert.warnings) std::cerr << "warning: " << w << '\n';

  RunManifest manifest;
  manifest.command = "price-infinite";
  manifest.config_hash = rc.config_hash;
  manifest.code_version = CARBON_VERSION;

  json table = json::array();
  for (std::size_t n = 0; n < cert.residuals.size(); ++n) {
    json row = {{"n", n + 1}, {"residual", cert.residuals[n]}, {"min_increment", cert.min_increments[n]}};
    row["ratio"] = n == 0 ? json(nullptr) : json(cert.ratios[n - 1]);
    table.push_back(row);
  }
  json certificate = {{"converged", cert.converged},
                      {"iterations", cert.iteration},
                      {"tol_l1", cert.tol_l1},
                      {"max_iter", cert.max_iter},
                      {"contraction_factor", std::exp(-rc.coeffs.rate * rc.picard.tau)},
                      {"self_consistency", sol.self_consistency},
                      {"structure",
                       {{"drift_dominated", sol.structure.drift_dominated},
                        {"uniformly_elliptic", sol.structure.uniformly_elliptic},
                        {"drift_lipschitz", sol.structure.drift_lipschitz},
                        {"min_sigma", sol.structure.min_sigma}}},
                      {"warnings", cert.warnings},
                      {"table", table}};

  const DiagnosticsReport d = diagnostics(*sol.w, rc.coeffs);
  print_diagnostics("w", d);
  manifest.verification["hard_invariants"] = d.hard_invariants_pass();
  manifest.verification["converged"] = cert.converged;
  manifest.verification["self_consistency"] = sol.self_consistency <= 2.0 * cert.tol_l1;

  const fs::path field_dir = opts.out / "field";
  write_grid_directory({{"w.grid", sol.w.get()}}, field_dir, rc.resolved_json);
  write_text(opts.out / "certificate.json", certificate.dump(2) + "\n");
  write_text(opts.out / "diagnostics.json", json{{"w", diagnostics_json(d)}}.dump(2) + "\n");
  for (const auto& f : {"spec.json", "manifest.json", "w.grid"}) manifest.add_artifact(opts.out, field_dir / f);
  manifest.add_artifact(opts.out, opts.out / "certificate.json");
  manifest.add_artifact(opts.out, opts.out / "diagnostics.json");

  std::cout << "Picard iterations " << cert.iteration << ", last residual " << cert.last_residual()
            << ", tol " << cert.tol_l1 << (cert.converged ? " (converged)" : " (NOT converged)") << '\n';
  manifest.exit_code = !cert.converged ? kNotConverged : (d.hard_invariants_pass() ? kOk : kInvariantFailure);
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(opts.out);
  return manifest.exit_code;
}

int cmd_simulate(const Options& opts) {
  const auto start = Clock::now();
  RunConfig rc;
  try {
    rc = load_config(opts);
  } catch (const Error& e) {
    return fail(kConfigError, e.what());
  }

  StoredField stored;
  try {
    const auto bad = hash_mismatches(opts.field);
    if (!bad.empty()) return fail(kFieldMismatch, "field file " + bad.front() + " does not match its hash");
    stored = read_field_directory(opts.field, false);
    const RunConfig field_cfg = RunConfig::from_text(stored.spec_text);
    if (field_cfg.config_hash != rc.config_hash)
      return fail(kFieldMismatch, "field was solved for a different configuration");
  } catch (const Error& e) {
    return fail(kFieldMismatch, e.what());
  }
  if (opts.verify_only) {
    std::cout << "field and configuration match\n";
    return kOk;
  }

  PathBundle bundle;
  try {
    if (rc.infinite) {
      if (stored.grids.size() != 1) return fail(kFieldMismatch, "infinite field must hold one grid");
      bundle = simulate(stored.grids.front(), rc.market, rc.coeffs, rc.simulation);
    } else {
      if (static_cast<int>(stored.grids.size()) != rc.market.num_periods())
        return fail(kFieldMismatch, "field period count does not match the configuration");
      std::vector<TerminalSurface> terminals(stored.grids.size(), rc.market.final_condition());
      std::vector<std::optional<DiagonalRange>> reach(stored.grids.size());
      const MultiPeriodField field(rc.market, std::move(stored.grids), std::move(terminals), std::move(reach));
      bundle = simulate(field, rc.coeffs, rc.simulation);
    }
  } catch (const ValidationError& e) {
    return fail(kConfigError, e.what());
  } catch (const Error& e) {
    return fail(kSolverFailure, e.what());
  }
  for (const auto& w : bundle.warnings) std::cerr << "warning: " << w << '\n';

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.config_hash = rc.config_hash;
  manifest.code_version = CARBON_VERSION;
  manifest.seeds = {rc.simulation.seed};

  json martingale = json::array();
  bool all_pass = true;
  double t_prev = 0.0;
  for (std::size_t k = 0; k < bundle.period_ends.size(); ++k) {
    const MartingaleReport m = martingale_test(bundle, t_prev, bundle.period_ends[k]);
    all_pass = all_pass && m.pass;
    martingale.push_back({{"k", k + 1},
                          {"t1", m.t1},
                          {"t2", m.t2},
                          {"mean_t1", m.mean_t1},
                          {"mean_t2", m.mean_t2},
                          {"delta", m.delta},
                          {"standard_error", m.standard_error},
                          {"paths", m.paths_used},
                          {"uses_left_limit", m.uses_left_limit},
                          {"pass", m.pass}});
    std::cout << "martingale period " << k + 1 << ": delta " << m.delta << ", SE " << m.standard_error
              << (m.pass ? " pass" : " FAIL") << '\n';
    t_prev = bundle.period_ends[k];
  }
  json jumps = json::array();
  for (const auto& r : jump_consistency_test(bundle, 3.0))
    jumps.push_back({{"k", r.k},
                     {"n_above", r.n_above},
                     {"n_below", r.n_below},
                     {"n_at_cap", r.n_at_cap},
                     {"above_residual", r.above_residual},
                     {"below_residual", r.below_residual},
                     {"at_cap_min_left", r.at_cap_min_left},
                     {"at_cap_max_left", r.at_cap_max_left}});
  bool y_range = true;
  for (double y : bundle.Y) y_range = y_range && y >= 0.0 && y <= 1.0;

  json report = {{"paths", bundle.n_paths},
                 {"aborted", bundle.n_aborted()},
                 {"seed", bundle.seed},
                 {"rng", bundle.rng},
                 {"steps_per_period", bundle.steps_per_period},
                 {"martingale", martingale},
                 {"jumps", jumps},
                 {"y_in_unit_interval", y_range}};
  fs::create_directories(opts.out);
  write_paths_csv(bundle, opts.out / "paths.csv");
  write_events_csv(bundle, opts.out / "events.csv");
  write_text(opts.out / "simulation_report.json", report.dump(2) + "\n");
  for (const auto& f : {"paths.csv", "events.csv", "simulation_report.json"})
    manifest.add_artifact(opts.out, opts.out / f);
  manifest.verification["martingale"] = all_pass;
  manifest.verification["y_range"] = y_range;
  manifest.exit_code = y_range ? kOk : kInvariantFailure;
  manifest.wall_clock_seconds = seconds_since(start);
  manifest.write(opts.out);
  return manifest.exit_code;
}

int cmd_verify(const Options& opts) {
  fs::path dir = opts.artifact;
  if (!fs::exists(dir / "manifest.json") && fs::exists(dir / "field" / "manifest.json")) dir /= "field";
  if (!fs::exists(dir / "manifest.json"))
    return fail(kConfigError, "no manifest.json under " + opts.artifact.string());

  StoredField stored;
  RunConfig rc;
  try {
    stored = read_field_directory(dir, false);
    rc = RunConfig::from_text(stored.spec_text);
  } catch (const Error& e) {
    return fail(kConfigError, e.what());
  }

  bool hard_ok = true;
  for (std::size_t i = 0; i < stored.grids.size(); ++i) {
    const DiagnosticsReport d = diagnostics(stored.grids[i], rc.coeffs);
    print_diagnostics(stored.manifest.grid_files[i], d);
    hard_ok = hard_ok && d.hard_invariants_pass();
  }
  if (!hard_ok) return fail(kInvariantFailure, "stored field violates a hard invariant");

  const auto bad = hash_mismatches(dir);
  if (!bad.empty()) return fail(kFieldMismatch, "file " + bad.front() + " does not match its manifest hash");
  std::cout << "verified " << stored.grids.size() << " grid(s)\n";
  return kOk;
}

}  // namespace carbon::cli
