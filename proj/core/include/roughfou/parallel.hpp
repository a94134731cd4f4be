#pragma once

#include <cstdint>
#include <functional>

namespace roughfou {

// Global cap on worker threads for all parallel loops; 0 means "use hardware
// concurrency".  Results never depend on the cap: work is split into fixed
// blocks whose partial results the callers combine in block order.
void set_max_threads(unsigned n);
unsigned max_threads();

// Runs body(block_index) for block_index = 0 .. n_blocks-1 on a temporary
// worker pool.  body must touch only state owned by its block (e.g. its slot
// in a preallocated result vector).  The first exception thrown by any block
// is rethrown on the calling thread after all workers join.
void parallel_for(std::uint64_t n_blocks, const std::function<void(std::uint64_t)>& body);

}  // namespace roughfou
