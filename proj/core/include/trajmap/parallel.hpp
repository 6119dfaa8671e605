#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace trajmap::par {

inline int resolve_workers(int workers) {
  if (workers >= 1) return workers;
  return static_cast<int>(
      std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
}

// fn(i) for i in [0, n), strided across up to `workers` threads. fn must
// only touch state owned by index i, so the schedule cannot change results.
inline void for_each_index(std::size_t n, int workers,
                           const std::function<void(std::size_t)>& fn) {
  const int active =
      static_cast<int>(std::min<std::size_t>(resolve_workers(workers), n));
  if (active <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> futs;
  futs.reserve(active - 1);
  const auto run = [&](int slot) {
    for (std::size_t i = slot; i < n; i += active) fn(i);
  };
  for (int s = 1; s < active; ++s)
    futs.push_back(std::async(std::launch::async, run, s));
  run(0);
  for (auto& f : futs) f.get();
}

}  // namespace trajmap::par
