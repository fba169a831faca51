#pragma once

#include <vector>

#include "gscl/graph.hpp"
#include "gscl/types.hpp"

namespace gscl {

/// Per-hop neighborhood statistics; hm duplicates per_hop_lc[0].
struct HopStats {
  std::vector<double> per_hop_avg_count;  // hops 1..k, empty sets count 0
  std::vector<double> per_hop_lc;         // hops 1..k, eligible-node mean
  double hm = 0.0;
};

namespace detail {

/// Nodes at exact distance 1..k from every anchor (truncated BFS per node).
inline std::vector<std::vector<std::vector<Index>>> all_hop_sets(const Graph& g, int k) {
  const Index n = g.num_nodes();
  std::vector<std::vector<std::vector<Index>>> sets(static_cast<std::size_t>(n));
  std::vector<int> dist(static_cast<std::size_t>(n), -1);
  std::vector<Index> touched;
  for (Index a = 0; a < n; ++a) {
    auto& mine = sets[static_cast<std::size_t>(a)];
    mine.assign(static_cast<std::size_t>(k), {});
    dist[static_cast<std::size_t>(a)] = 0;
    touched.assign(1, a);
    std::vector<Index> frontier{a};
    for (int depth = 1; depth <= k && !frontier.empty(); ++depth) {
      std::vector<Index> next;
      for (Index u : frontier)
        for (Index v : g.neighbors(u))
          if (dist[static_cast<std::size_t>(v)] < 0) {
            dist[static_cast<std::size_t>(v)] = depth;
            next.push_back(v);
            touched.push_back(v);
          }
      mine[static_cast<std::size_t>(depth - 1)] = next;
      frontier = std::move(next);
    }
    for (Index v : touched) dist[static_cast<std::size_t>(v)] = -1;
  }
  return sets;
}

}  // namespace detail

/// Mean over non-isolated nodes of the fraction of direct neighbors sharing
/// the node's label. Isolated nodes are skipped (their ratio is undefined).
inline double homophily_metric(const Graph& g) {
  const auto& y = g.labels();
  double sum = 0.0;
  Index eligible = 0;
  for (Index v = 0; v < g.num_nodes(); ++v) {
    auto nb = g.neighbors(v);
    if (nb.empty()) continue;
    Index same = 0;
    for (Index u : nb)
      if (y[static_cast<std::size_t>(u)] == y[static_cast<std::size_t>(v)]) ++same;
    sum += static_cast<double>(same) / static_cast<double>(nb.size());
    ++eligible;
  }
  if (eligible == 0) throw std::invalid_argument("all nodes isolated: homophily undefined");
  return sum / static_cast<double>(eligible);
}

/// Label consistency at hop n: the homophily ratio computed over exact n-hop
/// neighbors, averaged over nodes with a nonempty n-hop set.
inline double label_consistency(const Graph& g, int n) {
  if (n < 1) throw std::invalid_argument("hop must be >= 1");
  const auto& y = g.labels();
  auto sets = detail::all_hop_sets(g, n);
  double sum = 0.0;
  Index eligible = 0;
  for (Index v = 0; v < g.num_nodes(); ++v) {
    const auto& hop = sets[static_cast<std::size_t>(v)][static_cast<std::size_t>(n - 1)];
    if (hop.empty()) continue;
    Index same = 0;
    for (Index u : hop)
      if (y[static_cast<std::size_t>(u)] == y[static_cast<std::size_t>(v)]) ++same;
    sum += static_cast<double>(same) / static_cast<double>(hop.size());
    ++eligible;
  }
  if (eligible == 0) throw std::invalid_argument("no node has a nonempty " + std::to_string(n) +
                                                 "-hop set");
  return sum / static_cast<double>(eligible);
}

/// Average per-hop neighbor counts (all nodes, empty sets count 0) and the
/// per-hop label consistency. LC entries require labels.
inline HopStats hop_size_histogram(const Graph& g, int k) {
  if (k < 1) throw std::invalid_argument("hop range must be >= 1");
  auto sets = detail::all_hop_sets(g, k);
  const Index n = g.num_nodes();
  HopStats stats;
  stats.per_hop_avg_count.assign(static_cast<std::size_t>(k), 0.0);
  for (int h = 1; h <= k; ++h) {
    double total = 0.0;
    for (Index v = 0; v < n; ++v)
      total += static_cast<double>(sets[static_cast<std::size_t>(v)][static_cast<std::size_t>(h - 1)].size());
    stats.per_hop_avg_count[static_cast<std::size_t>(h - 1)] = total / static_cast<double>(n);
  }
  if (g.has_labels()) {
    const auto& y = g.labels();
    stats.per_hop_lc.assign(static_cast<std::size_t>(k), 0.0);
    for (int h = 1; h <= k; ++h) {
      double sum = 0.0;
      Index eligible = 0;
      for (Index v = 0; v < n; ++v) {
        const auto& hop = sets[static_cast<std::size_t>(v)][static_cast<std::size_t>(h - 1)];
        if (hop.empty()) continue;
        Index same = 0;
        for (Index u : hop)
          if (y[static_cast<std::size_t>(u)] == y[static_cast<std::size_t>(v)]) ++same;
        sum += static_cast<double>(same) / static_cast<double>(hop.size());
        ++eligible;
      }
      stats.per_hop_lc[static_cast<std::size_t>(h - 1)] =
          eligible > 0 ? sum / static_cast<double>(eligible) : 0.0;
    }
    stats.hm = stats.per_hop_lc[0];
  }
  return stats;
}

}  // namespace gscl
