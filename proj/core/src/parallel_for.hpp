#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace spsmux::detail {

// Run fn(0..count-1); with more than one worker the indices are handed out
// through an atomic counter, so every index runs exactly once regardless of
// scheduling. workers == 0 means hardware concurrency.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      fn(i);
  };
  const std::size_t spawn =
      std::min(static_cast<std::size_t>(workers), count);
  std::vector<std::thread> pool;
  pool.reserve(spawn - 1);
  for (std::size_t t = 1; t < spawn; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

}  // namespace spsmux::detail
