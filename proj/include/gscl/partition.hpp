#pragma once

#include <limits>
#include <vector>

#include "gscl/graph.hpp"
#include "gscl/rng.hpp"
#include "gscl/types.hpp"

namespace gscl {

inline constexpr std::size_t kNoNegativeCap = std::numeric_limits<std::size_t>::max();

/// Exact multi-hop neighborhood of one anchor: hop_sets[n-1] holds the nodes
/// at shortest-path distance exactly n, beyond_sample is drawn from everything
/// farther than k hops (unreachable nodes included). All sets are sorted.
struct HopPartition {
  Index anchor = 0;
  int k = 1;
  std::vector<std::vector<Index>> hop_sets;  // hops 1..k
  std::vector<Index> beyond_sample;

  const std::vector<Index>& hop(int h) const { return hop_sets[static_cast<std::size_t>(h - 1)]; }

  /// Members of hop h with the convention that hop k+1 is the beyond bucket.
  const std::vector<Index>& bucket(int h) const {
    return h == k + 1 ? beyond_sample : hop_sets[static_cast<std::size_t>(h - 1)];
  }
};

/// BFS partition of the whole node set around `anchor`. Nodes at distance > k
/// (or unreachable) form the beyond bucket, down-sampled uniformly without
/// replacement to `negative_cap`.
inline HopPartition bfs_hop_partition(const Graph& g, Index anchor, int k,
                                      std::size_t negative_cap, Rng& rng) {
  const Index n = g.num_nodes();
  if (anchor < 0 || anchor >= n) throw std::invalid_argument("anchor out of range");
  if (k < 1) throw std::invalid_argument("hop range k must be >= 1");

  HopPartition p;
  p.anchor = anchor;
  p.k = k;
  p.hop_sets.assign(static_cast<std::size_t>(k), {});

  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  dist[static_cast<std::size_t>(anchor)] = 0;
  std::vector<Index> frontier{anchor};
  for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
    std::vector<Index> next;
    for (Index u : frontier) {
      for (Index v : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] < 0) {
          dist[static_cast<std::size_t>(v)] = depth;
          next.push_back(v);
        }
      }
    }
    std::sort(next.begin(), next.end());
    p.hop_sets[static_cast<std::size_t>(depth - 1)] = next;
    frontier = std::move(next);
  }

  std::vector<Index> beyond;
  for (Index v = 0; v < n; ++v)
    if (dist[static_cast<std::size_t>(v)] < 0) beyond.push_back(v);
  p.beyond_sample = sample_without_replacement(std::move(beyond), negative_cap, rng);
  return p;
}

/// Partitions for every node as anchor, in node order.
inline std::vector<HopPartition> build_partitions(const Graph& g, int k, std::size_t negative_cap,
                                                  Rng& rng) {
  std::vector<HopPartition> out;
  out.reserve(static_cast<std::size_t>(g.num_nodes()));
  for (Index v = 0; v < g.num_nodes(); ++v)
    out.push_back(bfs_hop_partition(g, v, k, negative_cap, rng));
  return out;
}

}  // namespace gscl
