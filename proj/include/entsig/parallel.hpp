#pragma once

#include <cstddef>
#include <functional>

namespace entsig {

// Worker count for per-query parallel sections. ENTSIG_THREADS overrides;
// defaults to the hardware concurrency, capped at 16.
int worker_threads();

// Runs fn(i) for i in [0, n). Callers write results into preallocated
// slots indexed by i, so reductions stay ordered and outputs are identical
// for any worker count. Runs inline when the pool would have one worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace entsig
