#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace asgd {

// 0 means "machine parallelism".
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any task is rethrown after all workers join.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::min(resolve_threads(threads), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

inline constexpr std::size_t kReduceBlock = 4096;

// Order-independent reduction over [0, count): fixed-size blocks are
// reduced by block_fn(begin, end) (possibly in parallel) and the block
// results are merged pairwise in a fixed tree by combine(acc&, const acc&).
// The result does not depend on the thread count.
template <class Acc, class BlockFn, class Combine>
Acc reduce_blocks(std::size_t count, std::size_t threads, BlockFn&& block_fn, Combine&& combine) {
  const std::size_t n_blocks = std::max<std::size_t>(1, (count + kReduceBlock - 1) / kReduceBlock);
  std::vector<Acc> partial(n_blocks);
  parallel_for(n_blocks, threads, [&](std::size_t b) {
    const std::size_t begin = b * kReduceBlock;
    const std::size_t end = std::min(count, begin + kReduceBlock);
    partial[b] = block_fn(begin, end);
  });
  for (std::size_t width = 1; width < n_blocks; width *= 2) {
    for (std::size_t i = 0; i + width < n_blocks; i += 2 * width) {
      combine(partial[i], partial[i + width]);
    }
  }
  return std::move(partial[0]);
}

}  // namespace asgd
