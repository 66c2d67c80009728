#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace apxgrp {

// Run f(begin, end, chunk) over [0, n) split into `threads` contiguous chunks.
// Callers merge per-chunk results in chunk order, so results do not depend on
// the actual interleaving.
template <typename F>
void parallel_chunks(size_t n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    if (n > 0) f(size_t{0}, n, size_t{0});
    return;
  }
  size_t nchunks = std::min<size_t>(static_cast<size_t>(threads), n);
  size_t per = (n + nchunks - 1) / nchunks;
  std::vector<std::thread> pool;
  pool.reserve(nchunks);
  for (size_t c = 0; c < nchunks; ++c) {
    size_t b = c * per;
    size_t e = std::min(n, b + per);
    if (b >= e) break;
    pool.emplace_back([&, b, e, c] { f(b, e, c); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace apxgrp
