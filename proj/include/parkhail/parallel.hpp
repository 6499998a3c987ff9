#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace parkhail::detail {

// Runs fn(begin, end) over [0, n) split into fixed-size blocks claimed by a
// pool of workers. The block partition depends only on n and block_size, so
// any block-sequential state (warm starts) yields results that are identical
// for every worker count. threads <= 0 selects the hardware concurrency.
// The first exception thrown by fn is rethrown on the calling thread.
inline void parallel_blocks(std::size_t n, std::size_t block_size, int threads,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
  if (n == 0) return;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, threads);
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  threads = static_cast<int>(std::min<std::size_t>(threads, n_blocks));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (std::size_t b = next.fetch_add(1); b < n_blocks && !failed.load(); b = next.fetch_add(1)) {
      try {
        fn(b * block_size, std::min(n, (b + 1) * block_size));
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace parkhail::detail
