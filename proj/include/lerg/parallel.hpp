#pragma once

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace lerg {

/// Thread cap: LERG_THREADS env var, else hardware concurrency (min 1).
inline unsigned max_threads() {
  if (const char* env = std::getenv("LERG_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

/// Runs fn(begin, end) over disjoint index ranges covering [0, n).
/// Each range writes to disjoint outputs, so results do not depend on the
/// thread count.
inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
  const unsigned nthreads =
      static_cast<unsigned>(std::min<std::size_t>(max_threads(), n));
  if (nthreads <= 1 || n < 256) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  const std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (unsigned t = 0; t < nthreads; ++t) {
    const std::size_t begin = t * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

}  // namespace lerg
