#include "carbon/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "carbon/error.hpp"
#include "carbon/expression.hpp"
#include "carbon/hashing.hpp"
#include "carbon/multi_period.hpp"
#include "json.hpp"

namespace carbon {

using nlohmann::json;

std::string defaults_table_json() {
  static const json table = {
      {"version", kConfigVersion},
      {"period_length", 1.0},
      {"rate", 0.0},
      {"penalty", 1.0},
      {"initial", {{"e", 0.0}, {"p", 0.0}}},
      {"terminal", {{"kind", "indicator"}}},
      {"solver",
       {{"e_grid", "auto"},
        {"e_cells", 400},
        {"p_grid", {{"min", -2.5}, {"max", 2.5}, {"cells", 50}}},
        {"steps", 0},
        {"cfl", 0.9},
        {"viscosity", 0.0},
        {"mollify_width", 0.0},
        {"flux", "godunov"},
        {"max_slices", 257},
        {"threads", 0}}},
      {"infinite", {{"tol_l1", 0.0}, {"max_iter", 0}}},
      {"simulation",
       {{"paths", 10000}, {"steps_per_period", 512}, {"seed", 0}, {"record_every", 64}, {"periods", 1}}},
  };
  return table.dump(2);
}

namespace {

const json& child(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ValidationError("missing key " + where + "." + key);
  return obj.at(key);
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = child(obj, key, where);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "." + key + " must be finite");
  return x;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.is_object() && obj.contains(key) ? number(obj, key, where) : fallback;
}

int integer(const json& obj, const std::string& key, const std::string& where) {
  const json& v = child(obj, key, where);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string text(const json& obj, const std::string& key, const std::string& where) {
  const json& v = child(obj, key, where);
  if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw ValidationError("unknown key " + where + "." + item.key());
}

CoefficientSet build_coefficients(const json& node, double rate) {
  const std::string where = "coefficients";
  if (!node.is_object()) throw ValidationError("coefficients must be an object");
  if (node.contains("preset")) {
    reject_unknown(node, {"preset", "parameters"}, where);
    const std::string preset = text(node, "preset", where);
    const json params = node.value("parameters", json::object());
    const std::string pw = where + ".parameters";
    if (preset == "linear-abatement") {
      reject_unknown(params, {"m0", "m1", "m2", "kappa", "sigma"}, pw);
      return presets::linear_abatement(number(params, "m0", pw), number(params, "m1", pw),
                                       number(params, "m2", pw), number(params, "kappa", pw),
                                       number(params, "sigma", pw), rate);
    }
    if (preset == "no-factor") {
      reject_unknown(params, {"m0", "m2"}, pw);
      return presets::no_factor(number(params, "m0", pw), number(params, "m2", pw), rate);
    }
    if (preset == "burgers") {
      reject_unknown(params, {"c"}, pw);
      auto c = presets::no_factor(number_or(params, "c", 0.0, pw), 1.0, rate);
      c.name = "burgers";
      return c;
    }
    throw ValidationError("unknown coefficient preset '" + preset + "'");
  }
  if (!node.contains("expression"))
    throw ValidationError("coefficients needs either 'preset' or 'expression'");
  reject_unknown(node, {"expression", "dim_p", "constants"}, where);
  const json& ex = node.at("expression");
  reject_unknown(ex, {"mu", "b", "sigma"}, where + ".expression");
  CoefficientSet c;
  c.name = "expression";
  c.dim_p = node.value("dim_p", 0);
  c.rate = rate;
  const Expression mu = Expression::parse(text(ex, "mu", where + ".expression"));
  c.emissions_rate = [mu](double p, double y) { return mu(p, y); };
  if (c.dim_p > 0) {
    const Expression b = Expression::parse(ex.value("b", std::string("0")));
    const Expression s = Expression::parse(ex.value("sigma", std::string("0")));
    c.drift = [b](double p) { return b(p, 0.0); };
    c.vol = [s](double p) { return s(p, 0.0); };
  }
  const json constants = node.value("constants", json::object());
  reject_unknown(constants, {"lipschitz", "l1", "l2"}, where + ".constants");
  c.lipschitz = number_or(constants, "lipschitz", 1.0, where + ".constants");
  c.mono_l1 = number_or(constants, "l1", 1.0, where + ".constants");
  c.mono_l2 = number_or(constants, "l2", 1.0, where + ".constants");
  return c;
}

std::vector<CapFunction> build_caps(const json& node, int q, std::vector<std::string>& warnings) {
  const std::string where = "cap";
  reject_unknown(node, {"kind", "parameters"}, where);
  const CapKind kind = cap_kind_from_string(text(node, "kind", where));
  const json params = node.value("parameters", json::object());
  const std::string pw = where + ".parameters";
  std::vector<CapFunction> caps;
  switch (kind) {
    case CapKind::constant: {
      reject_unknown(params, {"per_period", "levels"}, pw);
      if (params.contains("levels")) {
        const auto levels = params.at("levels").get<std::vector<double>>();
        if (static_cast<int>(levels.size()) != q)
          throw ValidationError("cap.parameters.levels needs one level per period");
        for (double l : levels) caps.push_back(CapFunction::constant(l));
      } else {
        const double lambda = number(params, "per_period", pw);
        for (int k = 1; k <= q; ++k) caps.push_back(CapFunction::constant(k * lambda));
      }
      break;
    }
    case CapKind::affine_allocation: {
      reject_unknown(params, {"allocations", "mode"}, pw);
      const auto allocs = child(params, "allocations", pw).get<std::vector<double>>();
      const auto mode = allocation_mode_from_string(text(params, "mode", pw));
      for (int k = 1; k <= q; ++k) caps.push_back(make_cap_allocation(allocs, k, q, mode));
      break;
    }
    case CapKind::msr: {
      if (q != 2) throw ValidationError("the msr cap is defined for two periods");
      reject_unknown(params, {"c1", "c2", "kappa_low", "kappa_high", "top_up", "retain_fraction"}, pw);
      MsrParameters m;
      m.c1 = number(params, "c1", pw);
      m.c2 = number(params, "c2", pw);
      m.kappa_low = number(params, "kappa_low", pw);
      m.kappa_high = number(params, "kappa_high", pw);
      m.top_up = number(params, "top_up", pw);
      m.retain_fraction = number(params, "retain_fraction", pw);
      caps.push_back(CapFunction::constant(m.c1));
      caps.push_back(make_cap_msr(m));
      break;
    }
    case CapKind::custom:
      throw ValidationError("custom caps cannot be given in a configuration file");
  }
  for (std::size_t k = 0; k < caps.size(); ++k) {
    if (caps[k].is_constant()) continue;
    const CapValidation v = validate_cap(caps[k], -10.0, 10.0, 2001, 0.0);
    for (const auto& w : v.warnings) warnings.push_back("cap " + std::to_string(k + 1) + ": " + w);
  }
  return caps;
}

std::optional<TerminalSurface> build_terminal(const json& node, const MarketSpec& spec,
                                              std::string& kind) {
  reject_unknown(node, {"kind", "parameters"}, "terminal");
  kind = text(node, "kind", "terminal");
  const json params = node.value("parameters", json::object());
  if (kind == "indicator") return std::nullopt;
  if (kind == "constant")
    return TerminalSurface::constant(number(params, "value", "terminal.parameters"));
  if (kind == "logistic") {
    const double width = number(params, "width", "terminal.parameters");
    if (!(width > 0.0)) throw ValidationError("terminal.parameters.width must be positive");
    const CapFunction& last = spec.infinite ? CapFunction::constant(spec.per_period_cap)
                                            : spec.caps.back();
    if (!last.is_constant())
      throw ValidationError("logistic terminal data needs a constant final cap");
    const double level = last(0.0);
    return TerminalSurface::closed_form(
        [level, width](double, double e) { return 1.0 / (1.0 + std::exp(-(e - level) / width)); },
        0.0, "logistic");
  }
  throw ValidationError("unknown terminal kind '" + kind + "'");
}

AxisSpec axis_spec(const json& node, const std::string& where) {
  reject_unknown(node, {"min", "max", "cells"}, where);
  return {number(node, "min", where), number(node, "max", where), integer(node, "cells", where)};
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& json_text) {
  json user;
  try {
    user = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ValidationError(std::string("configuration is not valid JSON: ") + err.what());
  }
  if (!user.is_object()) throw ValidationError("configuration must be a JSON object");
  reject_unknown(user,
                 {"version", "label", "periods", "period_length", "period_ends", "rate", "penalty",
                  "initial", "cap", "coefficients", "terminal", "solver", "infinite", "simulation"},
                 "config");
  if (user.contains("version") && user.at("version") != kConfigVersion)
    throw ValidationError("unsupported configuration version " + user.at("version").dump());

  json tree = json::parse(defaults_table_json());
  tree.merge_patch(user);

  RunConfig rc;
  try {
    const double rate = number(tree, "rate", "config");
    const double penalty = number(tree, "penalty", "config");
    if (penalty != 1.0) throw ValidationError("only penalty = 1 is supported");
    if (rate < 0.0) throw ValidationError("rate must be non-negative");
    const double tau = number(tree, "period_length", "config");
    const json& initial = tree.at("initial");
    reject_unknown(initial, {"e", "p"}, "initial");

    rc.coeffs = build_coefficients(child(tree, "coefficients", "config"), rate);
    rc.coeffs.check_constants();

    // solver
    const json& sv = tree.at("solver");
    reject_unknown(sv, {"e_grid", "e_cells", "p_grid", "steps", "cfl", "viscosity", "mollify_width",
                        "flux", "max_slices", "threads"},
                   "solver");
    if (rc.coeffs.dim_p > 0) rc.solver.p_grid = axis_spec(sv.at("p_grid"), "solver.p_grid");
    rc.solver.n_steps = integer(sv, "steps", "solver");
    rc.solver.cfl = number(sv, "cfl", "solver");
    rc.solver.viscosity = number(sv, "viscosity", "solver");
    rc.solver.mollify_width = number(sv, "mollify_width", "solver");
    rc.solver.flux = flux_scheme_from_string(text(sv, "flux", "solver"));
    rc.solver.max_slices = integer(sv, "max_slices", "solver");
    rc.solver.threads = integer(sv, "threads", "solver");
    const int e_cells = integer(sv, "e_cells", "solver");

    const SampleBox box{rc.solver.p_grid ? rc.solver.p_grid->min : 0.0,
                        rc.solver.p_grid ? rc.solver.p_grid->max : 0.0, 0.0, 1.0};
    const ValidationReport report = validate_coefficients(rc.coeffs, box, 21);
    if (!report.pass) {
      std::string detail;
      for (const auto& v : report.violations) {
        if (v.kind == CoefficientViolation::Kind::not_decreasing) {
          detail = "; mu must be strictly decreasing in y (monotonicity violated)";
          break;
        }
      }
      throw ValidationError("coefficient check failed: " + report.summary() + detail);
    }

    // market
    const json& periods = child(tree, "periods", "config");
    const double e0 = number(initial, "e", "initial");
    const double p0 = number(initial, "p", "initial");
    if (periods.is_string()) {
      if (periods.get<std::string>() != "infinite")
        throw ValidationError("periods must be a positive integer or \"infinite\"");
      rc.infinite = true;
      if (!(rate > 0.0))
        throw ValidationError("the infinite-period market needs r > 0 for a unique price");
      const json& cap = child(tree, "cap", "config");
      if (text(cap, "kind", "cap") != "constant")
        throw ValidationError("the infinite-period market needs a constant per-period cap");
      reject_unknown(cap, {"kind", "parameters"}, "cap");
      const double lambda = number(child(cap, "parameters", "cap"), "per_period", "cap.parameters");
      rc.market = MarketSpec::infinite_market(tau, lambda, rate);
    } else {
      if (!periods.is_number_integer() || periods.get<int>() < 1)
        throw ValidationError("periods must be a positive integer or \"infinite\"");
      const int q = periods.get<int>();
      auto caps = build_caps(child(tree, "cap", "config"), q, rc.warnings);
      if (tree.contains("period_ends")) {
        const auto ends = tree.at("period_ends").get<std::vector<double>>();
        if (static_cast<int>(ends.size()) != q)
          throw ValidationError("period_ends needs one date per period");
        rc.market = MarketSpec::finite(ends, std::move(caps), rate);
      } else {
        rc.market = MarketSpec::finite_uniform(q, tau, std::move(caps), rate);
      }
    }
    rc.market.initial_emissions = e0;
    rc.market.initial_factor = p0;
    rc.market.final_terminal = build_terminal(tree.at("terminal"), rc.market, rc.terminal_kind);
    rc.market.check();

    // e-grid: explicit or sized from the domain of dependence
    const double speed = max_abs_rate(rc.coeffs, rc.solver);
    if (rc.infinite) {
      const double lambda = rc.market.per_period_cap;
      const double tail = 3.0 * tau * speed;
      if (sv.at("e_grid").is_string()) {
        if (sv.at("e_grid") != "auto") throw ValidationError("solver.e_grid must be \"auto\" or an axis");
        rc.solver.e_grid = {-(tail + lambda), lambda + 1.5 * tau * speed, e_cells};
      } else {
        rc.solver.e_grid = axis_spec(sv.at("e_grid"), "solver.e_grid");
        if (rc.solver.e_grid.min > -tail || rc.solver.e_grid.max < lambda + tau * speed) {
          std::ostringstream os;
          os << "e-grid [" << rc.solver.e_grid.min << ", " << rc.solver.e_grid.max
             << "] must cover the left tail down to " << -tail << " and the cap reach up to "
             << lambda + tau * speed;
          throw ValidationError(os.str());
        }
      }
    } else {
      const double horizon = rc.market.period_ends.back();
      double cap_lo = std::numeric_limits<double>::infinity();
      double cap_hi = -cap_lo;
      for (int k = 1; k <= rc.market.num_periods(); ++k) {
        const CapFunction& cap = rc.market.cap(k);
        if (cap.is_constant()) {
          cap_lo = std::min(cap_lo, cap(0.0));
          cap_hi = std::max(cap_hi, cap(0.0));
          continue;
        }
        const DiagonalRange reach = reachable_readings(rc.market, rc.coeffs, rc.solver, k);
        for (int i = 0; i <= 64; ++i) {
          const double x = reach.lo + (reach.hi - reach.lo) * i / 64.0;
          cap_lo = std::min(cap_lo, cap(x));
          cap_hi = std::max(cap_hi, cap(x));
        }
      }
      if (sv.at("e_grid").is_string()) {
        if (sv.at("e_grid") != "auto") throw ValidationError("solver.e_grid must be \"auto\" or an axis");
        rc.solver.e_grid = auto_e_grid(rc.coeffs, rc.solver, cap_lo, cap_hi, horizon, e_cells);
      } else {
        rc.solver.e_grid = axis_spec(sv.at("e_grid"), "solver.e_grid");
        check_domain_of_dependence(rc.coeffs, rc.solver, cap_lo, cap_hi, horizon);
      }
      if (e0 <= rc.solver.e_grid.min || e0 >= rc.solver.e_grid.max)
        throw ValidationError("initial emissions lie outside the e-grid");
    }
    rc.solver.check();

    // infinite-period iteration
    const json& inf = tree.at("infinite");
    reject_unknown(inf, {"tol_l1", "max_iter"}, "infinite");
    rc.picard.tau = tau;
    rc.picard.lambda = rc.market.per_period_cap;
    rc.picard.tol_l1 = number(inf, "tol_l1", "infinite");
    rc.picard.max_iter = integer(inf, "max_iter", "infinite");

    // simulation
    const json& sim = tree.at("simulation");
    reject_unknown(sim, {"paths", "steps_per_period", "seed", "record_every", "periods"}, "simulation");
    rc.simulation.n_paths = child(sim, "paths", "simulation").get<std::uint64_t>();
    rc.simulation.steps_per_period = integer(sim, "steps_per_period", "simulation");
    rc.simulation.seed = child(sim, "seed", "simulation").get<std::uint64_t>();
    rc.simulation.record_every = integer(sim, "record_every", "simulation");
    rc.simulation.periods = integer(sim, "periods", "simulation");
    rc.simulation.threads = rc.solver.threads;
  } catch (const json::exception& err) {
    throw ValidationError(std::string("configuration has a malformed value: ") + err.what());
  }

  rc.resolved_json = tree.dump(2);
  json hashed = tree;
  hashed.erase("simulation");
  hashed["solver"].erase("threads");
  rc.config_hash = sha256_hex(hashed.dump());
  return rc;
}

RunConfig RunConfig::from_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("cannot read configuration " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str());
}

}  // namespace carbon
