#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace levylab {

inline int resolve_workers(int hint) {
  if (hint > 0) return hint;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end, worker_id) over a static contiguous partition of
/// [0, n). Worker w always owns the same range for a given (n, workers),
/// so writes into per-path slots and per-worker accumulators are
/// schedule-independent. The first exception thrown by any worker is
/// rethrown after all workers have stopped.
inline void parallel_for_paths(
    std::int64_t n, int workers,
    const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
  workers = resolve_workers(workers);
  if (n <= 0) return;
  if (workers == 1 || n == 1) {
    fn(0, n, 0);
    return;
  }
  if (static_cast<std::int64_t>(workers) > n)
    workers = static_cast<int>(n);

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  const std::int64_t chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = static_cast<std::int64_t>(w) * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace levylab
