#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace t2c {

// Runs fn(begin, end) over [0, n) split into fixed-size blocks. Block
// boundaries depend only on n, never on the thread count, so any code that
// writes per-block results into preassigned slots produces identical output
// for any number of workers.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (n == 0) return;
  constexpr std::size_t kBlock = 1024;
  if (threads <= 1 || n <= kBlock) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t num_blocks = (n + kBlock - 1) / kBlock;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= num_blocks) break;
      const std::size_t begin = b * kBlock;
      const std::size_t end = begin + kBlock < n ? begin + kBlock : n;
      fn(begin, end);
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), num_blocks);
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

}  // namespace t2c
