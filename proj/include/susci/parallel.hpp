#pragma once

#include <cstddef>
#include <functional>

namespace susci {

// Worker count from SUSCI_THREADS, else std::thread::hardware_concurrency().
std::size_t default_thread_count();

// Runs body(i) for i in [0, count) on up to `threads` workers. Callers write
// results into per-index slots, so output never depends on scheduling. The
// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace susci
