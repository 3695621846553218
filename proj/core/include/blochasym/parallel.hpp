#pragma once

#include <cstddef>
#include <functional>

namespace blochasym {

// Effective worker count.  BLOCHASYM_THREADS in the environment wins, then a
// positive `requested`, then hardware concurrency.
int worker_count(int requested = 0);

// Runs fn(i) for i in [0, n) on `workers` threads.  Callers own result slots
// indexed by i, so the assembly is deterministic regardless of scheduling.
void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace blochasym
