#pragma once

#include <filesystem>

#include "carbon/grid.hpp"

namespace carbon {

inline constexpr int kGridFormatVersion = 1;

/// Binary container: 8-byte magic "CFBGRID\0", u32 format version, u64 header
/// length, UTF-8 JSON header (axes, metadata), then every value as a
/// little-endian float64 in row-major (t, p, e[, e_param]) order.
void write_grid(const ValueGrid& grid, const std::filesystem::path& path);
ValueGrid read_grid(const std::filesystem::path& path);

/// CSV with columns t,p,e[,e_param],v. `time_stride` thins the time axis
/// (the terminal slice is always written).
void export_grid_csv(const ValueGrid& grid, const std::filesystem::path& path,
                     std::size_t time_stride = 1);

}  // namespace carbon
