#include "carbon/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "carbon/error.hpp"

namespace carbon {

static_assert(std::endian::native == std::endian::little, "grid container assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'F', 'B', 'G', 'R', 'I', 'D', '\0'};

nlohmann::json header_of(const ValueGrid& g) {
  const auto& m = g.metadata();
  nlohmann::json h;
  h["format_version"] = kGridFormatVersion;
  h["axes"] = {{"t", g.t_axis().nodes()},
               {"p", m.dim_p > 0 ? g.p_axis().nodes() : std::vector<double>{}},
               {"e", g.e_axis().nodes()},
               {"e_param", g.e_param_axis().nodes()}};
  h["order"] = "t,p,e,e_param";
  h["metadata"] = {{"period", m.period},       {"t0", m.t0},
                   {"tau", m.tau},             {"rate", m.rate},
                   {"dim_p", m.dim_p},         {"terminal_hash", m.terminal_hash},
                   {"config_hash", m.config_hash}, {"label", m.label}};
  return h;
}

}  // namespace

void write_grid(const ValueGrid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  const std::string header = header_of(grid).dump();
  const std::uint32_t version = kGridFormatVersion;
  const std::uint64_t len = header.size();
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  const auto values = grid.values();
  out.write(reinterpret_cast<const char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
  if (!out) throw FormatError("failed writing " + path.string());
}

ValueGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open grid container " + path.string());
  char magic[8];
  std::uint32_t version = 0;
  std::uint64_t len = 0;
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw FormatError(path.string() + " is not a grid container");
  if (version != kGridFormatVersion)
    throw FormatError("unsupported grid format version " + std::to_string(version));
  if (len > (1ull << 30)) throw FormatError("grid header is implausibly large");
  std::string header(len, '\0');
  in.read(header.data(), static_cast<std::streamsize>(len));
  if (!in) throw FormatError("truncated grid header in " + path.string());

  nlohmann::json h;
  try {
    h = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed grid header: ") + e.what());
  }
  try {
    const auto& ax = h.at("axes");
    const auto& md = h.at("metadata");
    GridMetadata m;
    m.period = md.at("period").get<int>();
    m.t0 = md.at("t0").get<double>();
    m.tau = md.at("tau").get<double>();
    m.rate = md.at("rate").get<double>();
    m.dim_p = md.at("dim_p").get<int>();
    m.terminal_hash = md.at("terminal_hash").get<std::string>();
    m.config_hash = md.at("config_hash").get<std::string>();
    m.label = md.at("label").get<std::string>();
    ValueGrid g(Axis(ax.at("t").get<std::vector<double>>()), Axis(ax.at("p").get<std::vector<double>>()),
                Axis(ax.at("e").get<std::vector<double>>()),
                Axis(ax.at("e_param").get<std::vector<double>>()), m);
    auto values = g.values();
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size_bytes()));
    if (!in) throw FormatError("truncated grid values in " + path.string());
    if (in.peek() != std::char_traits<char>::eof())
      throw FormatError("trailing bytes after grid values in " + path.string());
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("grid header is missing fields: ") + e.what());
  }
}

void export_grid_csv(const ValueGrid& g, const std::filesystem::path& path, std::size_t time_stride) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  if (!f) throw FormatError("cannot open " + path.string() + " for writing");
  std::fputs(g.has_param() ? "t,p,e,e_param,v\n" : "t,p,e,v\n", f);
  const std::size_t stride = std::max<std::size_t>(1, time_stride);
  for (std::size_t ti = 0; ti < g.nt(); ++ti) {
    if (ti % stride != 0 && ti + 1 != g.nt()) continue;
    for (std::size_t pi = 0; pi < g.np(); ++pi)
      for (std::size_t ei = 0; ei < g.ne(); ++ei)
        for (std::size_t qi = 0; qi < g.nq(); ++qi) {
          if (g.has_param())
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g\n", g.t_axis()[ti], g.p_axis()[pi],
                         g.e_axis()[ei], g.e_param_axis()[qi], g.at(ti, pi, ei, qi));
          else
            std::fprintf(f, "%.17g,%.17g,%.17g,%.17g\n", g.t_axis()[ti], g.p_axis()[pi], g.e_axis()[ei],
                         g.at(ti, pi, ei, qi));
        }
  }
  if (std::fclose(f) != 0) throw FormatError("failed writing " + path.string());
}

}  // namespace carbon
