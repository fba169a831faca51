#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "gscl/types.hpp"

namespace gscl {

using Rng = std::mt19937_64;

/// Derives an independent stream from a base seed. Used so that e.g. the
/// partition sampler and the parameter init never share a stream.
inline Rng fork_rng(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 of (seed ^ rotated stream) as the child seed
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

/// Uniform sample of `size` distinct elements from `pool`, returned sorted.
/// If size >= pool.size() the whole pool is returned.
inline std::vector<Index> sample_without_replacement(std::vector<Index> pool, std::size_t size,
                                                     Rng& rng) {
  if (size >= pool.size()) {
    std::sort(pool.begin(), pool.end());
    return pool;
  }
  // partial Fisher-Yates
  for (std::size_t i = 0; i < size; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(size);
  std::sort(pool.begin(), pool.end());
  return pool;
}

/// Weighted sample without replacement: successive draws with the remaining
/// weights renormalized. Returned sorted.
inline std::vector<Index> weighted_sample_without_replacement(std::vector<Index> pool,
                                                              std::vector<double> weights,
                                                              std::size_t size, Rng& rng) {
  if (size >= pool.size()) {
    std::sort(pool.begin(), pool.end());
    return pool;
  }
  std::vector<Index> out;
  out.reserve(size);
  std::size_t n = pool.size();
  for (std::size_t draw = 0; draw < size; ++draw) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += weights[i];
    std::size_t chosen = n - 1;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += weights[i];
        if (r < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      // all remaining weights zero: fall back to uniform
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      chosen = pick(rng);
    }
    out.push_back(pool[chosen]);
    std::swap(pool[chosen], pool[n - 1]);
    std::swap(weights[chosen], weights[n - 1]);
    --n;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace gscl
