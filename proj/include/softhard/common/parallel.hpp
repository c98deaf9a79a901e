#pragma once

#include <cstddef>
#include <functional>

namespace softhard {

// Worker count: SOFTHARD_THREADS if set and positive, otherwise the
// hardware concurrency (at least 1).
std::size_t thread_count();

// Runs body(i) for i in [0, count). Work is split into contiguous chunks,
// so callers that write results into slot i get deterministic output
// independent of the thread count. The first exception thrown by any
// worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace softhard
