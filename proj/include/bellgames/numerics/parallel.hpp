#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <utility>
#include <vector>

namespace bellgames {

/// Worker count used by every parallel evaluator. Defaults to the
/// BELLGAMES_WORKERS environment variable, else the hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

/// Items [0, n) are cut into fixed blocks of `block_size`; each block is
/// evaluated sequentially by `block_fn(begin, end)` and the per-block results
/// are combined by a pairwise tree in block order. The partition never depends
/// on the worker count, so the result is bitwise identical for any number of
/// workers.
template <class T, class BlockFn, class Combine>
T deterministic_reduce(std::size_t n, std::size_t block_size, BlockFn&& block_fn, Combine&& combine,
                       T identity) {
  if (n == 0) return identity;
  block_size = std::max<std::size_t>(block_size, 1);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  std::vector<T> partial(blocks, identity);

  auto run_block = [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    const std::size_t end = std::min(n, begin + block_size);
    partial[b] = block_fn(begin, end);
  };

  const std::size_t workers = std::min(worker_count(), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) run_block(b);
      });
    }
  }

  while (partial.size() > 1) {
    std::vector<T> next_level;
    next_level.reserve((partial.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < partial.size(); i += 2)
      next_level.push_back(combine(std::move(partial[i]), std::move(partial[i + 1])));
    if (partial.size() % 2 == 1) next_level.push_back(std::move(partial.back()));
    partial = std::move(next_level);
  }
  return std::move(partial.front());
}

/// Deterministic sum of `term(i)` for i in [0, n).
template <class Term>
double deterministic_sum(std::size_t n, Term&& term, std::size_t block_size = 1024) {
  return deterministic_reduce<double>(
      n, block_size,
      [&](std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) s += term(i);
        return s;
      },
      [](double a, double b) { return a + b; }, 0.0);
}

}  // namespace bellgames
