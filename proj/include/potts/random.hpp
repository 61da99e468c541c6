#pragma once

// Seeded randomness and deterministic chunked parallelism.
//
// Splitting rule: work of `total` items is cut into fixed chunks of
// kChunkSize items. Chunk k draws from an mt19937_64 seeded with
// derive_seed(master, k), where derive_seed is two rounds of splitmix64
// over master + (k+1) * golden gamma. Chunk boundaries never depend on
// the worker count, so results are identical for any number of threads.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

#include "potts/model.hpp"

namespace potts {

inline constexpr std::size_t kChunkSize = 4096;

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential() { return exp_(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }

  /// Uniform on the standard simplex with `k` vertices (flat Dirichlet).
  std::vector<double> dirichlet(int k);
  Permutation permutation(int q);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::exponential_distribution<double> exp_{1.0};
};

std::size_t chunk_count(std::size_t total, std::size_t chunk = kChunkSize);

/// Runs fn(chunk_index, begin, end) for every chunk and returns the results
/// in chunk order. Exceptions from workers are rethrown on the caller.
template <class Fn>
auto run_chunks(std::size_t total, int threads, Fn fn, std::size_t chunk = kChunkSize)
    -> std::vector<decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}, std::size_t{}, std::size_t{}));
  const std::size_t n = chunk_count(total, chunk);
  std::vector<Result> results(n);
  auto run_one = [&](std::size_t k) {
    const std::size_t begin = k * chunk;
    const std::size_t end = std::min(total, begin + chunk);
    results[k] = fn(k, begin, end);
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) run_one(k);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          run_one(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace potts
