#pragma once

#include <cstddef>
#include <functional>

namespace bridgekit {

// Worker count: BRIDGEKIT_THREADS if set, else hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks across
// workers; fn must write only to its own index's slot so results are
// identical for any worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace bridgekit
