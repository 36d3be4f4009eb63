#pragma once

#include <cstddef>
#include <functional>

namespace paraeval {

/// Runs body(i) for i in [0, n) on up to `threads` workers; 0 means hardware
/// concurrency. After the first exception no new indices start, and that
/// exception is rethrown once all workers have stopped.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace paraeval
