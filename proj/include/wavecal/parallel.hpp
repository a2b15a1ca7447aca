#ifndef WAVECAL_PARALLEL_HPP
#define WAVECAL_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace wavecal {

/// Worker-pool width: WAVECAL_THREADS if set, else hardware concurrency,
/// clamped to [1, 16].
inline int worker_count() {
  if (const char* env = std::getenv("WAVECAL_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n > 16 ? 16 : n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 2;
  return hw > 16 ? 16 : static_cast<int>(hw);
}

/// Batch map: applies fn(i) for i in [0, count) on a transient pool and
/// returns when all are done. Results must be written into preallocated
/// slots indexed by i so output order never depends on scheduling.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn,
                         int threads = 0) {
  if (threads <= 0) threads = worker_count();
  if (threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error = nullptr;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) first_error = std::current_exception();
        return;
      }
    }
  };
  int spawn = threads < static_cast<int>(count) ? threads : static_cast<int>(count);
  pool.reserve(spawn);
  for (int t = 0; t < spawn; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

template <class R>
std::vector<R> parallel_map(std::size_t count, const std::function<R(std::size_t)>& fn,
                            int threads = 0) {
  std::vector<R> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = fn(i); }, threads);
  return out;
}

}  // namespace wavecal

#endif
