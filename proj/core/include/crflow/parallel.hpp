#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace crflow {

/// Worker count from FLOW_THREADS (default 1); always at least 1.
inline unsigned flow_threads() {
  if (const char* env = std::getenv("FLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

/// Runs body(begin, end) over disjoint contiguous chunks of [0, count).
/// Bodies must write to disjoint outputs; reductions happen afterwards in index order.
template <typename Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers = std::min<std::size_t>(flow_threads(), std::max<std::size_t>(count / 256, 1));
  if (workers <= 1) {
    body(std::size_t{0}, count);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
}

}  // namespace crflow
