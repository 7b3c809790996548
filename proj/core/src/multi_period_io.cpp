#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carbon/error.hpp"
#include "carbon/grid_io.hpp"
#include "carbon/hashing.hpp"
#include "carbon/multi_period.hpp"

namespace carbon {

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

FieldManifest parse_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) throw FormatError("missing manifest " + path.string());
  try {
    const auto j = nlohmann::json::parse(slurp(path));
    FieldManifest m;
    m.spec_file = j.at("spec_file").get<std::string>();
    m.spec_hash = j.at("spec_hash").get<std::string>();
    m.grid_files = j.at("grid_files").get<std::vector<std::string>>();
    m.hashes = j.at("hashes").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed field manifest: ") + e.what());
  }
}

}  // namespace

void write_grid_directory(const std::vector<NamedGrid>& grids, const fs::path& dir,
                          const std::string& spec_text) {
  fs::create_directories(dir);
  FieldManifest m;
  m.spec_file = "spec.json";
  {
    std::ofstream out(dir / m.spec_file, std::ios::binary | std::ios::trunc);
    out << spec_text;
    if (!out) throw FormatError("failed writing " + (dir / m.spec_file).string());
  }
  m.spec_hash = sha256_file(dir / m.spec_file);
  m.hashes[m.spec_file] = m.spec_hash;
  for (const auto& [name, grid] : grids) {
    write_grid(*grid, dir / name);
    m.grid_files.push_back(name);
    m.hashes[name] = sha256_file(dir / name);
  }
  nlohmann::json j;
  j["format_version"] = kGridFormatVersion;
  j["periods"] = grids.size();
  j["spec_file"] = m.spec_file;
  j["spec_hash"] = m.spec_hash;
  j["grid_files"] = m.grid_files;
  j["hashes"] = m.hashes;
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  out << j.dump(2) << '\n';
  if (!out) throw FormatError("failed writing field manifest");
}

void write_field_directory(const MultiPeriodField& field, const fs::path& dir,
                           const std::string& spec_text) {
  std::vector<NamedGrid> grids;
  for (int k = 1; k <= field.num_periods(); ++k)
    grids.emplace_back("period_" + std::to_string(k) + ".grid", &field.period(k));
  write_grid_directory(grids, dir, spec_text);
}

std::vector<std::string> hash_mismatches(const fs::path& dir) {
  const FieldManifest m = parse_manifest(dir);
  std::vector<std::string> bad;
  for (const auto& [name, hash] : m.hashes) {
    const fs::path file = dir / name;
    if (!fs::exists(file) || sha256_file(file) != hash) bad.push_back(name);
  }
  return bad;
}

StoredField read_field_directory(const fs::path& dir, bool check_hashes) {
  StoredField out;
  out.manifest = parse_manifest(dir);
  if (check_hashes) {
    const auto bad = hash_mismatches(dir);
    if (!bad.empty()) throw FormatError("field file " + bad.front() + " does not match its manifest hash");
  }
  out.spec_text = slurp(dir / out.manifest.spec_file);
  for (const auto& name : out.manifest.grid_files) out.grids.push_back(read_grid(dir / name));
  return out;
}

}  // namespace carbon
