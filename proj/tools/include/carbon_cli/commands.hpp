#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace carbon::cli {

/// Process exit codes. These values are a stable contract.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kSolverFailure = 3,
  kInvariantFailure = 4,
  kNotConverged = 5,
  kFieldMismatch = 6,
};

struct Options {
  std::filesystem::path config;
  std::filesystem::path out = "out";
  /// simulate: field directory written by price-multi or price-infinite
  std::filesystem::path field;
  /// verify: artifact directory
  std::filesystem::path artifact;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  std::optional<int> threads;
  bool verify_only = false;
};

int cmd_price_multi(const Options& opts);
int cmd_price_infinite(const Options& opts);
int cmd_simulate(const Options& opts);
int cmd_verify(const Options& opts);

}  // namespace carbon::cli
