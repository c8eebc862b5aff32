#include "mgt/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mgt {

namespace {
std::atomic<int> g_default_threads{0};
}

int resolve_thread_count(int requested) {
  if (requested > 0) return std::min(requested, 64);
  const int configured = g_default_threads.load();
  if (configured > 0) return configured;
  if (const char* env = std::getenv("MGT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return std::min(n, 64);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

void set_default_thread_count(int n) { g_default_threads.store(std::max(n, 0)); }

int default_thread_count() { return resolve_thread_count(0); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, int threads) {
  if (n == 0) return;
  const int t = std::min<std::size_t>(resolve_thread_count(threads), n);
  if (t <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(t);
  const std::size_t chunk = (n + t - 1) / t;
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  for (int w = 0; w < t; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end]() {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) std::rethrow_exception(err);
}

}  // namespace mgt
