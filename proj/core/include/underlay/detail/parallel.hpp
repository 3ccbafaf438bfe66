#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace underlay::detail {

inline int resolve_threads(int threads) {
  if (threads > 0) return threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Reduces body(acc, i) over i in [0, n).  Workers pull fixed-size chunks
// from a shared cursor and write only their own accumulator; merge folds
// the per-worker accumulators in worker order.  Results are independent of
// thread count as long as body derives everything it needs from i alone
// and merge is order-insensitive over the accumulated quantities.
template <class Acc, class Body, class Merge>
Acc parallel_reduce(std::int64_t n, int threads, Acc init, Body&& body,
                    Merge&& merge) {
  threads = resolve_threads(threads);
  constexpr std::int64_t kChunk = 1024;

  if (threads == 1 || n <= kChunk) {
    Acc acc = std::move(init);
    for (std::int64_t i = 0; i < n; ++i) body(acc, i);
    return acc;
  }

  std::vector<Acc> accs(static_cast<std::size_t>(threads), init);
  std::atomic<std::int64_t> cursor{0};
  std::exception_ptr failure;
  std::atomic_flag failed = ATOMIC_FLAG_INIT;

  auto run = [&](int worker) {
    try {
      Acc& acc = accs[static_cast<std::size_t>(worker)];
      for (;;) {
        const std::int64_t begin = cursor.fetch_add(kChunk);
        if (begin >= n) break;
        const std::int64_t end = std::min(begin + kChunk, n);
        for (std::int64_t i = begin; i < end; ++i) body(acc, i);
      }
    } catch (...) {
      if (!failed.test_and_set()) failure = std::current_exception();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) pool.emplace_back(run, w);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  Acc total = std::move(accs[0]);
  for (std::size_t w = 1; w < accs.size(); ++w) merge(total, accs[w]);
  return total;
}

}  // namespace underlay::detail
