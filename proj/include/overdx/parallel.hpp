#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace overdx {

// Index-based parallel loop. Each index is processed exactly once and results
// must be written to per-index slots, so output is identical for any thread
// count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n < 2 * static_cast<std::size_t>(threads)) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::size_t nthreads = static_cast<std::size_t>(threads);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < n; i += nthreads) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace overdx
