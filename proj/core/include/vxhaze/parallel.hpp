#pragma once

#include <cstddef>
#include <functional>

namespace vxhaze {

// Number of workers to use for a requested thread count (0 = hardware).
int resolve_threads(int requested);

// Runs body(begin, end, worker) over [0, n) split into contiguous chunks, one
// per worker. Chunk boundaries depend only on n and the worker count.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t, int)>& body);

}  // namespace vxhaze
