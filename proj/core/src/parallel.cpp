#include "blochasym/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace blochasym {

int worker_count(int requested) {
  if (const char* env = std::getenv("BLOCHASYM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

void parallel_for(std::size_t n, int workers,
                  const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  workers = worker_count(workers);
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr eptr;
  std::mutex eptr_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(eptr_mutex);
          if (!eptr) eptr = std::current_exception();
          break;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (eptr) std::rethrow_exception(eptr);
}

}  // namespace blochasym
