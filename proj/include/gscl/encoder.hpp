#pragma once

#include <cmath>
#include <vector>

#include "gscl/graph.hpp"
#include "gscl/rng.hpp"
#include "gscl/types.hpp"

namespace gscl {

/// D^{-1/2} (A+I) D^{-1/2} with the self-loop included in the degree. Isolated
/// nodes get degree 1 from the loop, so the operator is always well defined.
template <typename Scalar>
SparseMatrix<Scalar> normalize_adjacency(const Graph& g) {
  const Index n = g.num_nodes();
  VectorD inv_sqrt(n);
  for (Index v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
  std::vector<Eigen::Triplet<Scalar, Index>> trips;
  trips.reserve(static_cast<std::size_t>(g.num_edges() + n));
  for (Index u = 0; u < n; ++u) {
    trips.emplace_back(u, u, static_cast<Scalar>(inv_sqrt[u] * inv_sqrt[u]));
    for (Index v : g.neighbors(u))
      trips.emplace_back(u, v, static_cast<Scalar>(inv_sqrt[u] * inv_sqrt[v]));
  }
  SparseMatrix<Scalar> s(n, n);
  s.setFromTriplets(trips.begin(), trips.end());
  s.makeCompressed();
  return s;
}

template <typename Scalar>
DenseMatrix<Scalar> apply_activation(const DenseMatrix<Scalar>& x, Activation act) {
  switch (act) {
    case Activation::relu:
      return x.cwiseMax(Scalar(0));
    case Activation::prelu:
      return x.cwiseMax(Scalar(0)) + Scalar(kPreluSlope) * x.cwiseMin(Scalar(0));
    case Activation::rrelu:
      return x.cwiseMax(Scalar(0)) + Scalar(kRreluSlope) * x.cwiseMin(Scalar(0));
    case Activation::linear:
      return x;
  }
  return x;
}

/// GCN layer weights plus the two-layer projection head used by the critic.
template <typename Scalar>
struct EncoderParams {
  std::vector<DenseMatrix<Scalar>> layer_weights;  // W_l: D_{l-1} x D_l
  DenseMatrix<Scalar> proj_w1, proj_b1;            // D' x Dp, 1 x Dp
  DenseMatrix<Scalar> proj_w2, proj_b2;            // Dp x Dp, 1 x Dp
  Activation activation = Activation::prelu;

  std::vector<DenseMatrix<Scalar>*> all() {
    std::vector<DenseMatrix<Scalar>*> ps;
    for (auto& w : layer_weights) ps.push_back(&w);
    ps.push_back(&proj_w1);
    ps.push_back(&proj_b1);
    ps.push_back(&proj_w2);
    ps.push_back(&proj_b2);
    return ps;
  }
  std::vector<const DenseMatrix<Scalar>*> all() const {
    std::vector<const DenseMatrix<Scalar>*> ps;
    for (auto& w : layer_weights) ps.push_back(&w);
    ps.push_back(&proj_w1);
    ps.push_back(&proj_b1);
    ps.push_back(&proj_w2);
    ps.push_back(&proj_b2);
    return ps;
  }

  template <typename T>
  EncoderParams<T> cast() const {
    EncoderParams<T> out;
    for (const auto& w : layer_weights) out.layer_weights.push_back(w.template cast<T>());
    out.proj_w1 = proj_w1.template cast<T>();
    out.proj_b1 = proj_b1.template cast<T>();
    out.proj_w2 = proj_w2.template cast<T>();
    out.proj_b2 = proj_b2.template cast<T>();
    out.activation = activation;
    return out;
  }
};

namespace detail {

template <typename Scalar>
DenseMatrix<Scalar> glorot_uniform(Index rows, Index cols, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-bound, bound);
  DenseMatrix<Scalar> m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = static_cast<Scalar>(u(rng));
  return m;
}

}  // namespace detail

/// Fan-based symmetric uniform init for all weight matrices; biases start at
/// zero. layer_dims chains input dim through hidden dims; proj_dim defaults to
/// the final hidden dim when 0.
template <typename Scalar>
EncoderParams<Scalar> init_params(const std::vector<Index>& layer_dims, Index proj_dim,
                                  Activation activation, std::uint64_t seed) {
  if (layer_dims.size() < 2) throw std::invalid_argument("need at least input and one layer dim");
  for (Index d : layer_dims)
    if (d < 1) throw std::invalid_argument("layer dims must be >= 1");
  Rng rng = fork_rng(seed, 100);
  EncoderParams<Scalar> p;
  p.activation = activation;
  for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l)
    p.layer_weights.push_back(detail::glorot_uniform<Scalar>(layer_dims[l], layer_dims[l + 1], rng));
  const Index hidden = layer_dims.back();
  const Index dp = proj_dim > 0 ? proj_dim : hidden;
  p.proj_w1 = detail::glorot_uniform<Scalar>(hidden, dp, rng);
  p.proj_b1 = DenseMatrix<Scalar>::Zero(1, dp);
  p.proj_w2 = detail::glorot_uniform<Scalar>(dp, dp, rng);
  p.proj_b2 = DenseMatrix<Scalar>::Zero(1, dp);
  return p;
}

/// H = GCN_L(...GCN_1(X, A)...): each layer is act(S * X * W) with the shared
/// normalized operator S; no activation after the final layer.
template <typename Scalar>
DenseMatrix<Scalar> encode(const SparseMatrix<Scalar>& s_norm, const DenseMatrix<Scalar>& x,
                           const EncoderParams<Scalar>& params) {
  DenseMatrix<Scalar> h = x;
  for (std::size_t l = 0; l < params.layer_weights.size(); ++l) {
    if (h.cols() != params.layer_weights[l].rows())
      throw std::invalid_argument("encoder dim mismatch at layer " + std::to_string(l));
    DenseMatrix<Scalar> t = s_norm * h;
    h = t * params.layer_weights[l];
    if (l + 1 < params.layer_weights.size()) h = apply_activation(h, params.activation);
  }
  return h;
}

template <typename Scalar>
DenseMatrix<Scalar> encode(const Graph& g, const EncoderParams<Scalar>& params) {
  return encode(normalize_adjacency<Scalar>(g), g.features().cast<Scalar>().eval(), params);
}

/// Z = act(H W1 + b1) W2 + b2, row-wise.
template <typename Scalar>
DenseMatrix<Scalar> project(const DenseMatrix<Scalar>& h, const EncoderParams<Scalar>& params) {
  if (h.cols() != params.proj_w1.rows()) throw std::invalid_argument("projection dim mismatch");
  DenseMatrix<Scalar> t = h * params.proj_w1;
  t.rowwise() += params.proj_b1.row(0);
  t = apply_activation(t, params.activation);
  DenseMatrix<Scalar> z = t * params.proj_w2;
  z.rowwise() += params.proj_b2.row(0);
  return z;
}

}  // namespace gscl
