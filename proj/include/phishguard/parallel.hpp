#pragma once

#include <cstddef>
#include <functional>

namespace phishguard {

/// Process-wide worker count used by parallel_for (default 1).
void set_thread_count(int threads);
int thread_count();

/// Runs fn(0..n-1). Each index is executed exactly once; results must be
/// written to per-index slots so the outcome is independent of scheduling.
/// Nested calls from inside a worker run serially. The first exception
/// thrown by any index is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace phishguard
