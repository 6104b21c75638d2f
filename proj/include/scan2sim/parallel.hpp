#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace scan2sim {

inline int thread_count() {
  if (const char* env = std::getenv("SCAN2SIM_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(i) for i in [begin, end). Work is split into fixed-size chunks so that
// any chunk-level reduction stays identical regardless of the thread count.
inline void parallel_for(int64_t begin, int64_t end, const std::function<void(int64_t)>& fn,
                         int64_t chunk = 1024) {
  int64_t n = end - begin;
  if (n <= 0) return;
  int threads = thread_count();
  if (threads <= 1 || n < chunk * 2) {
    for (int64_t i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  int64_t nchunks = (n + chunk - 1) / chunk;
  auto worker = [&]() {
    for (;;) {
      int64_t c = next.fetch_add(1);
      if (c >= nchunks) break;
      int64_t lo = begin + c * chunk;
      int64_t hi = std::min(end, lo + chunk);
      for (int64_t i = lo; i < hi; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace scan2sim
