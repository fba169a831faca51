#pragma once

#include <numeric>
#include <vector>

#include "gscl/graph.hpp"
#include "gscl/rng.hpp"

namespace gscl {

struct SbmSpec {
  std::vector<Index> block_sizes;
  double p_in = 0.1;
  double p_out = 0.01;
  Index feature_dim = 16;
  double feature_noise = 1.0;
  /// Fraction of nodes whose class (label + feature mean) is reassigned to a
  /// different block after the edges are wired; models noisy neighborhoods.
  double label_flip_rate = 0.0;
  std::uint64_t seed = 0;
};

/// Planted-community random graph: edges within a block with probability p_in,
/// across blocks with p_out; labels are block ids; features are the block mean
/// plus feature_noise * standard normal. Bit-reproducible under a fixed seed.
inline Graph generate_sbm(const SbmSpec& spec) {
  if (spec.block_sizes.empty()) throw std::invalid_argument("block_sizes must be nonempty");
  if (!(spec.p_out >= 0.0 && spec.p_out <= spec.p_in && spec.p_in <= 1.0))
    throw std::invalid_argument("need 0 <= p_out <= p_in <= 1");
  if (spec.label_flip_rate < 0.0 || spec.label_flip_rate > 1.0)
    throw std::invalid_argument("label_flip_rate must be in [0,1]");

  const Index n = std::accumulate(spec.block_sizes.begin(), spec.block_sizes.end(), Index{0});
  const int num_blocks = static_cast<int>(spec.block_sizes.size());

  std::vector<int> block(static_cast<std::size_t>(n));
  {
    Index v = 0;
    for (int b = 0; b < num_blocks; ++b)
      for (Index i = 0; i < spec.block_sizes[static_cast<std::size_t>(b)]; ++i) block[static_cast<std::size_t>(v++)] = b;
  }

  Rng edge_rng = fork_rng(spec.seed, 0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::pair<Index, Index>> edges;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) {
      double p = block[static_cast<std::size_t>(u)] == block[static_cast<std::size_t>(v)] ? spec.p_in : spec.p_out;
      if (unif(edge_rng) < p) edges.emplace_back(u, v);
    }
  }

  // class = block, except for the flipped subset (edges keep the block wiring)
  std::vector<int> label = block;
  if (spec.label_flip_rate > 0.0 && num_blocks > 1) {
    Rng flip_rng = fork_rng(spec.seed, 1);
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), flip_rng);
    auto num_flips = static_cast<std::size_t>(spec.label_flip_rate * static_cast<double>(n) + 0.5);
    std::uniform_int_distribution<int> other(0, num_blocks - 2);
    for (std::size_t i = 0; i < num_flips && i < order.size(); ++i) {
      Index v = order[i];
      int shift = other(flip_rng);
      int cur = label[static_cast<std::size_t>(v)];
      label[static_cast<std::size_t>(v)] = shift >= cur ? shift + 1 : shift;
    }
  }

  Rng feat_rng = fork_rng(spec.seed, 2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixD means(num_blocks, spec.feature_dim);
  for (int b = 0; b < num_blocks; ++b)
    for (Index j = 0; j < spec.feature_dim; ++j) means(b, j) = gauss(feat_rng);
  MatrixF x(n, spec.feature_dim);
  for (Index v = 0; v < n; ++v)
    for (Index j = 0; j < spec.feature_dim; ++j)
      x(v, j) = static_cast<float>(means(label[static_cast<std::size_t>(v)], j) +
                                   spec.feature_noise * gauss(feat_rng));

  return Graph::from_edges(std::move(edges), std::move(x), std::move(label));
}

}  // namespace gscl
