#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace topoae {

inline unsigned hardware_threads() {
  const unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : h;
}

/// Runs f(i) for i in [begin, end) over `threads` workers with contiguous
/// chunks. threads == 0 means all hardware threads. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, F&& f) {
  if (threads == 0) threads = hardware_threads();
  const std::size_t count = end > begin ? end - begin : 0;
  if (threads <= 1 || count < 2 * threads) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  const std::size_t chunk = (count + threads - 1) / threads;
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = begin + t * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi, t] {
      try {
        for (std::size_t i = lo; i < hi; ++i) f(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace topoae
