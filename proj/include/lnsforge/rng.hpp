#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lnsforge/errors.hpp"

namespace lnsforge {

// splitmix64 finalizer; used to derive independent stream seeds from a base
// seed and an index (instance index, sample index, run index, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seeded RNG with hand-rolled distributions. std::mt19937_64 output is
// pinned by the standard, but the std distributions are not; rolling our
// own keeps generated instances byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 bits of precision.
  double uniform_real() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * uniform_real();
  }

  // Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi) {
    if (hi < lo) throw InvalidParameterError("uniform_int: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(next_u64() % span);
  }

  bool bernoulli(double p) { return uniform_real() < p; }

  // First k entries of a seeded Fisher-Yates shuffle of pool; pool is
  // consumed. Used for sampling without replacement.
  template <typename T>
  std::vector<T> sample_without_replacement(std::vector<T> pool,
                                            std::size_t k) {
    if (k > pool.size())
      throw InvalidParameterError("sample_without_replacement: k > pool size");
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(next_u64() % (pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(next_u64() % i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lnsforge
