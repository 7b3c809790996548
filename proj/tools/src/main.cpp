#include <iostream>

#include <CLI11.hpp>

#include "carbon/error.hpp"
#include "carbon_cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace carbon::cli;
  CLI::App app{"Carbon allowance pricing: decoupling-field solver and path simulator"};
  app.require_subcommand(1);

  Options opts;
  std::uint64_t seed = 0, paths = 0;
  int threads = 0;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (falls back to CARBON_FBSDE_THREADS)");
    sub->add_flag("--verify-only", opts.verify_only, "Validate inputs without computing");
  };

  auto* multi = app.add_subcommand("price-multi", "Solve a finite multi-period market");
  add_common(multi);
  auto* infinite = app.add_subcommand("price-infinite", "Solve the infinite-period market by Picard iteration");
  add_common(infinite);
  auto* sim = app.add_subcommand("simulate", "Simulate (P, E, Y) paths against a solved field");
  add_common(sim);
  sim->add_option("--field", opts.field, "Field directory written by price-multi/price-infinite")->required();
  sim->add_option("--seed", seed, "RNG seed (overrides the configuration)");
  sim->add_option("--paths", paths, "Number of paths (overrides the configuration)");
  auto* verify = app.add_subcommand("verify", "Re-check stored artifacts without re-solving");
  verify->add_option("artifact", opts.artifact, "Artifact or field directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  for (auto* sub : {multi, infinite, sim}) {
    if (sub->count("--threads")) opts.threads = threads;
  }
  if (sim->count("--seed")) opts.seed = seed;
  if (sim->count("--paths")) opts.paths = paths;

  try {
    if (*multi) return cmd_price_multi(opts);
    if (*infinite) return cmd_price_infinite(opts);
    if (*sim) return cmd_simulate(opts);
    return cmd_verify(opts);
  } catch (const carbon::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolverFailure;
  }
}
