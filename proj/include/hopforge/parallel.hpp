#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace hopforge {

inline unsigned default_thread_count() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1u : n;
}

/// Runs fn(begin, end) over contiguous chunks of [0, n). Chunk boundaries
/// depend only on (n, threads), never on scheduling, so any reduction that
/// combines chunk results in chunk order is deterministic.
template <typename Fn>
void parallel_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    if (n > 0) fn(std::size_t{0}, n, std::size_t{0});
    return;
  }
  std::size_t n_chunks = std::min<std::size_t>(threads, n);
  std::size_t per = (n + n_chunks - 1) / n_chunks;
  std::vector<std::thread> pool;
  pool.reserve(n_chunks);
  for (std::size_t c = 0; c < n_chunks; ++c) {
    std::size_t b = c * per;
    std::size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace hopforge
