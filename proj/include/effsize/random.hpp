#pragma once

// Seeded randomness with a fixed, documented algorithm (generator "v1"):
//   engine    std::mt19937_64 seeded with the 64-bit user seed
//   uniform   (draw >> 11) * 2^-53, in [0, 1)
//   integer   rejection sampling on raw draws, then modulo
//   subsets   partial Fisher-Yates over 0..n-1, returned sorted
// std::*_distribution is avoided because its output is implementation
// defined; this keeps streams identical across standard libraries.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace effsize {

class Rng {
public:
  static constexpr const char* kAlgorithm = "mt19937_64/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double prob) { return uniform() < prob; }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - (max % n + 1) % n;
    std::uint64_t x = engine_();
    while (x > limit) x = engine_();
    return x % n;
  }

  /// k distinct indices from 0..n-1, sorted ascending.
  std::vector<Eigen::Index> subset(Eigen::Index n, Eigen::Index k) {
    std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Eigen::Index{0});
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto j = i + static_cast<Eigen::Index>(below(static_cast<std::uint64_t>(n - i)));
      std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    pool.resize(static_cast<std::size_t>(k));
    std::sort(pool.begin(), pool.end());
    return pool;
  }

private:
  std::mt19937_64 engine_;
};

}  // namespace effsize
