#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace uqg {

inline int default_worker_count() {
  if (const char* env = std::getenv("UQGRAPH_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

/// Evaluate fn(i) for i in [0, n); results land at index i, so the output is
/// identical for every worker count.
template <typename T, typename Fn>
std::vector<T> parallel_map(int n, int workers, Fn&& fn) {
  std::vector<T> out(static_cast<std::size_t>(n));
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  auto run = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) out[i] = fn(i);
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace uqg
