#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace ffmlp {

// Worker cap: FFMLP_THREADS if set to a positive integer, else the hardware count.
inline std::size_t thread_cap() {
  if (const char* env = std::getenv("FFMLP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count). Work is split into contiguous chunks; each index is
// visited exactly once, so results written to per-index slots are deterministic.
// Small jobs (count * cost_hint below min_work) stay on the calling thread.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t cost_hint = 1,
                  std::size_t min_work = 200000) {
  const std::size_t workers = std::min(thread_cap(), count);
  if (workers <= 1 || count * cost_hint < min_work) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([begin, end, &fn] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ffmlp
