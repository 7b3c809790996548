#pragma once

#include <cstddef>
#include <functional>

namespace carbon {

/// Thread count from an explicit request, falling back to the
/// CARBON_FBSDE_THREADS environment variable and then to 1.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` threads using contiguous
/// static chunks. Each index must write only to its own output slot, which
/// keeps results independent of the thread count. The first exception thrown
/// by any body is rethrown after all threads join.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace carbon
