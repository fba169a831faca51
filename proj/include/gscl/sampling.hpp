#pragma once

#include <optional>
#include <vector>

#include "gscl/partition.hpp"
#include "gscl/rng.hpp"
#include "gscl/types.hpp"

namespace gscl {

enum class SamplerStrategy { none, uniform, pagerank };

inline SamplerStrategy sampler_from_string(const std::string& s) {
  if (s == "none") return SamplerStrategy::none;
  if (s == "uniform") return SamplerStrategy::uniform;
  if (s == "pagerank") return SamplerStrategy::pagerank;
  throw std::invalid_argument("unknown sampler strategy: " + s);
}

inline std::string to_string(SamplerStrategy s) {
  switch (s) {
    case SamplerStrategy::none: return "none";
    case SamplerStrategy::uniform: return "uniform";
    case SamplerStrategy::pagerank: return "pagerank";
  }
  return "?";
}

/// Per-hop down-sampling configuration. The kept size is either a ratio of
/// the hop set (the default knob, ratio in (0,1]) or an absolute cap.
struct SamplerConfig {
  SamplerStrategy strategy = SamplerStrategy::none;
  std::optional<double> ratio = 0.2;
  std::optional<std::size_t> per_hop_size;
  double damping = 0.85;
  double pr_tolerance = 1e-8;
  std::uint64_t seed = 0;

  std::size_t size_for(std::size_t hop_size) const {
    if (per_hop_size) return *per_hop_size;
    if (!ratio || hop_size == 0) return hop_size;
    auto s = static_cast<std::size_t>(*ratio * static_cast<double>(hop_size) + 0.5);
    return std::max<std::size_t>(1, std::min(s, hop_size));
  }
};

/// Samples `size` nodes without replacement from hop `hop` of the partition
/// (hop == k+1 addresses the beyond bucket). Uniform strategy weights all
/// members equally; pagerank weights them by their global PageRank score
/// renormalized over the hop set. Empty hop sets yield empty samples.
inline std::vector<Index> sample_hop(const HopPartition& partition, int hop, std::size_t size,
                                     const SamplerConfig& cfg, const VectorD* scores, Rng& rng) {
  if (hop < 1 || hop > partition.k + 1) throw std::invalid_argument("hop out of range");
  const std::vector<Index>& pool = partition.bucket(hop);
  if (pool.empty()) return {};
  switch (cfg.strategy) {
    case SamplerStrategy::none:
      return pool;
    case SamplerStrategy::uniform:
      return sample_without_replacement(pool, size, rng);
    case SamplerStrategy::pagerank: {
      if (!scores) throw std::invalid_argument("pagerank sampling requires scores");
      std::vector<double> w(pool.size());
      for (std::size_t i = 0; i < pool.size(); ++i) w[i] = (*scores)[pool[i]];
      return weighted_sample_without_replacement(pool, std::move(w), size, rng);
    }
  }
  return {};
}

/// Applies the sampler to hops 1..k and re-draws the beyond bucket uniformly
/// from the full distance->k complement; used once per epoch during training.
/// `base` must hold the full (unsampled) hop sets.
inline HopPartition sample_partition(const HopPartition& base, Index num_nodes,
                                     std::size_t negative_cap, const SamplerConfig& cfg,
                                     const VectorD* scores, Rng& rng) {
  HopPartition out;
  out.anchor = base.anchor;
  out.k = base.k;
  out.hop_sets.reserve(base.hop_sets.size());
  for (int h = 1; h <= base.k; ++h) {
    const auto& pool = base.hop(h);
    out.hop_sets.push_back(sample_hop(base, h, cfg.size_for(pool.size()), cfg, scores, rng));
  }
  std::vector<bool> near(static_cast<std::size_t>(num_nodes), false);
  near[static_cast<std::size_t>(base.anchor)] = true;
  for (const auto& hop : base.hop_sets)
    for (Index v : hop) near[static_cast<std::size_t>(v)] = true;
  std::vector<Index> beyond;
  for (Index v = 0; v < num_nodes; ++v)
    if (!near[static_cast<std::size_t>(v)]) beyond.push_back(v);
  out.beyond_sample = sample_without_replacement(std::move(beyond), negative_cap, rng);
  return out;
}

}  // namespace gscl
