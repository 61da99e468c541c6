#include "potts/random.hpp"

#include <algorithm>
#include <numeric>

namespace potts {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master + (stream + 1) * 0x9E3779B97F4A7C15ULL));
}

std::vector<double> Rng::dirichlet(int k) {
  std::vector<double> b(static_cast<std::size_t>(k));
  double total = 0.0;
  for (double& e : b) {
    e = exponential();
    total += e;
  }
  for (double& e : b) e /= total;
  return b;
}

Permutation Rng::permutation(int q) {
  std::vector<int> im(static_cast<std::size_t>(q));
  std::iota(im.begin(), im.end(), 0);
  std::shuffle(im.begin(), im.end(), engine_);
  return Permutation(std::move(im));
}

std::size_t chunk_count(std::size_t total, std::size_t chunk) { return (total + chunk - 1) / chunk; }

}  // namespace potts
