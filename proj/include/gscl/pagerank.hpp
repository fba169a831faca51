#pragma once

#include <vector>

#include "gscl/graph.hpp"
#include "gscl/types.hpp"

namespace gscl {

struct PageRankResult {
  VectorD scores;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on the column-stochastic walk matrix with uniform teleport.
/// Mass of dangling (degree-0) nodes is redistributed uniformly. Stops when
/// the L1 change drops below `tolerance`; if max_iters is hit first the scores
/// are still returned with converged=false.
inline PageRankResult pagerank(const Graph& g, double damping = 0.85, double tolerance = 1e-8,
                               int max_iters = 200) {
  const Index n = g.num_nodes();
  if (n < 1) throw std::invalid_argument("pagerank needs at least one node");
  PageRankResult res;
  res.scores = VectorD::Constant(n, 1.0 / static_cast<double>(n));
  VectorD next(n);
  for (int it = 1; it <= max_iters; ++it) {
    double dangling = 0.0;
    for (Index u = 0; u < n; ++u)
      if (g.degree(u) == 0) dangling += res.scores[u];
    next.setZero();
    for (Index u = 0; u < n; ++u) {
      const Index deg = g.degree(u);
      if (deg == 0) continue;
      const double share = res.scores[u] / static_cast<double>(deg);
      for (Index v : g.neighbors(u)) next[v] += share;
    }
    const double teleport = (1.0 - damping + damping * dangling) / static_cast<double>(n);
    next = damping * next + VectorD::Constant(n, teleport);
    const double delta = (next - res.scores).template lpNorm<1>();
    res.scores.swap(next);
    res.iterations = it;
    if (delta < tolerance) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace gscl
