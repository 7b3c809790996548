#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace carbon::cli {

/// Record of one command invocation, written as run_manifest.json next to
/// the artifacts it lists. Wall-clock time is recorded here only, so the
/// artifacts themselves stay byte-identical across reruns.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::string code_version;
  std::vector<std::uint64_t> seeds;
  double wall_clock_seconds = 0.0;
  /// path relative to the output directory -> SHA-256
  std::map<std::string, std::string> artifacts;
  /// suite name -> pass
  std::map<std::string, bool> verification;
  int exit_code = 0;

  void add_artifact(const std::filesystem::path& root, const std::filesystem::path& file);
  void write(const std::filesystem::path& root) const;
};

/// Writes text to a file, throwing on I/O failure.
void write_text(const std::filesystem::path& file, const std::string& text);
std::string read_text(const std::filesystem::path& file);

}  // namespace carbon::cli
