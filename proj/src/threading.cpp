#include "sls/threading.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sls {

namespace {
int g_workers = 0;  // 0 = not yet resolved
}

int worker_count() {
  if (g_workers > 0) return g_workers;
  if (const char* env = std::getenv("SLS_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) {
      g_workers = w;
      return g_workers;
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  g_workers = hw > 0 ? static_cast<int>(hw) : 1;
  return g_workers;
}

void set_worker_count(int workers) {
  if (workers < 1) throw std::invalid_argument("set_worker_count: workers < 1");
  g_workers = workers;
}

void parallel_for(int count, const std::function<void(int)>& fn, int workers) {
  if (count <= 0) return;
  if (workers <= 0) workers = worker_count();
  workers = std::min(workers, count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&]() {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace sls
