#include "carbon_cli/artifacts.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carbon/config.hpp"
#include "carbon/error.hpp"
#include "carbon/hashing.hpp"

namespace carbon::cli {

namespace fs = std::filesystem;

void write_text(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw FormatError("failed writing " + file.string());
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError("cannot read " + file.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void RunManifest::add_artifact(const fs::path& root, const fs::path& file) {
  artifacts[fs::relative(file, root).generic_string()] = sha256_file(file);
}

void RunManifest::write(const fs::path& root) const {
  nlohmann::json j;
  j["command"] = command;
  j["config_hash"] = config_hash;
  j["code_version"] = code_version;
  j["seeds"] = seeds;
  j["wall_clock_seconds"] = wall_clock_seconds;
  j["artifacts"] = artifacts;
  j["verification"] = verification;
  j["exit_code"] = exit_code;
  j["defaults"] = nlohmann::json::parse(defaults_table_json());
  write_text(root / "run_manifest.json", j.dump(2) + "\n");
}

}  // namespace carbon::cli
