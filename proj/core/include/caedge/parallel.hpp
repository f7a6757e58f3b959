#pragma once

#include <cstddef>
#include <functional>

namespace caedge {

/// Runs fn(i) for i in [0, count) on up to `threads` workers, each owning a
/// contiguous index range. Callers get determinism by writing results into
/// per-index slots and reducing sequentially afterwards. threads <= 1 runs
/// inline. The first exception thrown by any worker is rethrown after join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace caedge
