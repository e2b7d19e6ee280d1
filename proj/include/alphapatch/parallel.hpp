#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace alphapatch {

// Worker cap: ALPHA_PATCH_THREADS env var, 0 or unset = hardware auto.
inline int max_workers() {
  static const int cached = [] {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("ALPHA_PATCH_THREADS")) {
      long v = std::strtol(env, nullptr, 10);
      if (v > 0) return static_cast<int>(std::min<long>(v, 256));
    }
    return static_cast<int>(hw);
  }();
  return cached;
}

// Static index partition; fn(i) writes results only to slot i, so the output
// is independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t nt =
      std::min<std::size_t>(static_cast<std::size_t>(max_workers()), n);
  if (nt <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(nt - 1);
  const std::size_t chunk = (n + nt - 1) / nt;
  auto run_range = [&fn](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  };
  for (std::size_t w = 1; w < nt; ++w) {
    std::size_t lo = w * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    workers.emplace_back(run_range, lo, hi);
  }
  run_range(0, std::min(n, chunk));
  for (auto& t : workers) t.join();
}

}  // namespace alphapatch
