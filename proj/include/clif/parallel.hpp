#pragma once

#include <cstddef>
#include <functional>

namespace clif {

/// Worker count used by parallel_for: CLIF_THREADS if set, else hardware
/// concurrency (at least 1).
std::size_t worker_count() noexcept;

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on each,
/// possibly concurrently. Bodies must write disjoint outputs; results are
/// then independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 64);

}  // namespace clif
