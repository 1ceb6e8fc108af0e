#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace lnsforge {

// Runs f(0..n-1) on up to `workers` threads. Work items must be independent
// and write only to their own result slots; with seeded per-item state the
// outcome is identical to the serial order.
template <typename F>
void parallel_for(int n, int workers, F&& f) {
  if (n <= 0) return;
  if (workers <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      f(i);
    }
  };
  std::vector<std::thread> pool;
  const int k = std::min(workers, n);
  pool.reserve(k);
  for (int t = 0; t < k; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace lnsforge
