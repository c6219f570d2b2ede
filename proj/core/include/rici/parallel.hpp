#pragma once

#include <cstddef>
#include <functional>

namespace rici {

/// Worker cap used by parallel_for. 0 means hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Calls body(i) for every i in [0, n). Indices are split into contiguous
/// blocks, one per worker; callers write results into per-index slots so the
/// output never depends on scheduling. Exceptions are rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace rici
