#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gscl/types.hpp"

namespace gscl {

struct NodeId {
  int v = -1;
};

/// Define-by-run reverse-mode tape over dense matrices. Scalars are 1x1.
/// Operator coverage is exactly what the encoder, the ranking losses and the
/// linear probe need; backward walks the nodes in reverse creation order.
template <typename Scalar>
class Tape {
 public:
  using Mat = DenseMatrix<Scalar>;
  using PullFn = std::function<void(Tape&, const Mat&)>;

  struct Node {
    Mat value;
    Mat grad;  // empty until touched by backward
    bool requires_grad = false;
    PullFn pull;  // scatters this node's grad to parents
  };

  NodeId variable(Mat v) { return push(std::move(v), true, nullptr); }
  NodeId constant(Mat v) { return push(std::move(v), false, nullptr); }

  const Mat& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id.v)].value; }
  Scalar scalar(NodeId id) const { return value(id)(0, 0); }
  bool requires_grad(NodeId id) const {
    return nodes_[static_cast<std::size_t>(id.v)].requires_grad;
  }

  /// Gradient of the last backward() with respect to node `id`; zeros if the
  /// node did not influence the loss.
  Mat grad(NodeId id) const {
    const Node& n = nodes_[static_cast<std::size_t>(id.v)];
    if (n.grad.size() == 0) return Mat::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void backward(NodeId root) {
    Node& r = nodes_[static_cast<std::size_t>(root.v)];
    if (r.value.rows() != 1 || r.value.cols() != 1)
      throw std::invalid_argument("backward root must be scalar");
    if (!std::isfinite(static_cast<double>(r.value(0, 0))))
      throw NumericError("non-finite loss in forward pass");
    for (auto& n : nodes_) n.grad.resize(0, 0);
    r.grad = Mat::Ones(1, 1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it)
      if (it->pull && it->grad.size() != 0) it->pull(*this, it->grad);
  }

  void accumulate(NodeId id, const Mat& g) {
    Node& n = nodes_[static_cast<std::size_t>(id.v)];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0)
      n.grad = g;
    else
      n.grad += g;
  }

  void accumulate_row(NodeId id, Index row, const Eigen::RowVectorX<Scalar>& g) {
    Node& n = nodes_[static_cast<std::size_t>(id.v)];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    n.grad.row(row) += g;
  }

  NodeId push(Mat value, bool requires, PullFn pull) {
    nodes_.push_back(Node{std::move(value), Mat(), requires, std::move(pull)});
    return NodeId{static_cast<int>(nodes_.size()) - 1};
  }

  /// For ops whose backward needs the node's own output value: push first,
  /// then attach the pull closure capturing the fresh id.
  void set_pull(NodeId id, PullFn pull) { nodes_[static_cast<std::size_t>(id.v)].pull = std::move(pull); }

  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<Node> nodes_;
};

// --- ops ----------------------------------------------------------------------

template <typename S>
NodeId matmul(Tape<S>& t, NodeId a, NodeId b) {
  typename Tape<S>::Mat y = t.value(a) * t.value(b);
  bool req = t.requires_grad(a) || t.requires_grad(b);
  return t.push(std::move(y), req, [a, b](Tape<S>& tt, const auto& g) {
    tt.accumulate(a, (g * tt.value(b).transpose()).eval());
    tt.accumulate(b, (tt.value(a).transpose() * g).eval());
  });
}

/// y = S * x with S a constant sparse operator owned by the caller; `s` must
/// outlive the tape.
template <typename S>
NodeId spmm(Tape<S>& t, const SparseMatrix<S>& s, NodeId x) {
  typename Tape<S>::Mat y = s * t.value(x);
  return t.push(std::move(y), t.requires_grad(x), [&s, x](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, (s.transpose() * g).eval());
  });
}

template <typename S>
NodeId add(Tape<S>& t, NodeId a, NodeId b) {
  typename Tape<S>::Mat y = t.value(a) + t.value(b);
  bool req = t.requires_grad(a) || t.requires_grad(b);
  return t.push(std::move(y), req, [a, b](Tape<S>& tt, const auto& g) {
    tt.accumulate(a, g);
    tt.accumulate(b, g);
  });
}

template <typename S>
NodeId sub(Tape<S>& t, NodeId a, NodeId b) {
  typename Tape<S>::Mat y = t.value(a) - t.value(b);
  bool req = t.requires_grad(a) || t.requires_grad(b);
  return t.push(std::move(y), req, [a, b](Tape<S>& tt, const auto& g) {
    tt.accumulate(a, g);
    tt.accumulate(b, (-g).eval());
  });
}

/// x + row-broadcast bias (bias is 1 x C).
template <typename S>
NodeId add_row_broadcast(Tape<S>& t, NodeId x, NodeId bias) {
  typename Tape<S>::Mat y = t.value(x);
  y.rowwise() += t.value(bias).row(0);
  bool req = t.requires_grad(x) || t.requires_grad(bias);
  return t.push(std::move(y), req, [x, bias](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, g);
    tt.accumulate(bias, g.colwise().sum().eval());
  });
}

template <typename S>
NodeId scale(Tape<S>& t, NodeId x, S c) {
  typename Tape<S>::Mat y = c * t.value(x);
  return t.push(std::move(y), t.requires_grad(x),
                [x, c](Tape<S>& tt, const auto& g) { tt.accumulate(x, (c * g).eval()); });
}

template <typename S>
NodeId activation(Tape<S>& t, NodeId x, Activation act) {
  if (act == Activation::linear) return x;
  const S slope = act == Activation::relu    ? S(0)
                  : act == Activation::prelu ? S(kPreluSlope)
                                             : S(kRreluSlope);
  typename Tape<S>::Mat y = t.value(x).cwiseMax(S(0)) + slope * t.value(x).cwiseMin(S(0));
  return t.push(std::move(y), t.requires_grad(x), [x, slope](Tape<S>& tt, const auto& g) {
    auto mask = (tt.value(x).array() > S(0)).template cast<S>() +
                slope * (tt.value(x).array() <= S(0)).template cast<S>();
    tt.accumulate(x, (g.array() * mask).matrix().eval());
  });
}

template <typename S>
NodeId exp_elem(Tape<S>& t, NodeId x) {
  typename Tape<S>::Mat y = t.value(x).array().exp();
  NodeId out = t.push(std::move(y), t.requires_grad(x), nullptr);
  t.set_pull(out, [x, out](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, (g.array() * tt.value(out).array()).matrix().eval());
  });
  return out;
}

template <typename S>
NodeId log_elem(Tape<S>& t, NodeId x) {
  typename Tape<S>::Mat y = t.value(x).array().log();
  return t.push(std::move(y), t.requires_grad(x), [x](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, (g.array() / tt.value(x).array()).matrix().eval());
  });
}

/// Elementwise min(x, c): the clamped branch passes zero gradient; exact ties
/// take the unclamped branch.
template <typename S>
NodeId min_with(Tape<S>& t, NodeId x, S c) {
  typename Tape<S>::Mat y = t.value(x).cwiseMin(c);
  return t.push(std::move(y), t.requires_grad(x), [x, c](Tape<S>& tt, const auto& g) {
    auto mask = (tt.value(x).array() <= c).template cast<S>();
    tt.accumulate(x, (g.array() * mask).matrix().eval());
  });
}

/// Sum of all entries -> scalar.
template <typename S>
NodeId sum(Tape<S>& t, NodeId x) {
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = t.value(x).sum();
  return t.push(std::move(y), t.requires_grad(x), [x](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, Tape<S>::Mat::Constant(tt.value(x).rows(), tt.value(x).cols(), g(0, 0)).eval());
  });
}

/// Sum of scalar nodes -> scalar.
template <typename S>
NodeId sum_of(Tape<S>& t, std::vector<NodeId> terms) {
  S acc = 0;
  bool req = false;
  for (NodeId id : terms) {
    acc += t.scalar(id);
    req = req || t.requires_grad(id);
  }
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = acc;
  return t.push(std::move(y), req, [terms = std::move(terms)](Tape<S>& tt, const auto& g) {
    for (NodeId id : terms) tt.accumulate(id, g);
  });
}

/// Frobenius norm squared -> scalar.
template <typename S>
NodeId squared_frobenius(Tape<S>& t, NodeId x) {
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = t.value(x).squaredNorm();
  return t.push(std::move(y), t.requires_grad(x), [x](Tape<S>& tt, const auto& g) {
    tt.accumulate(x, (S(2) * g(0, 0) * tt.value(x)).eval());
  });
}

/// Cosine similarities between row `anchor` of z and the listed member rows;
/// result is |members| x 1. Rows must have nonzero norm.
template <typename S>
NodeId cosine_rows(Tape<S>& t, NodeId z, Index anchor, std::vector<Index> members) {
  const auto& Z = t.value(z);
  const Eigen::RowVectorX<S> a = Z.row(anchor);
  const S na = a.norm();
  if (!(na > S(0))) throw NumericError("cosine similarity with zero-norm anchor row");
  typename Tape<S>::Mat y(static_cast<Index>(members.size()), 1);
  for (std::size_t m = 0; m < members.size(); ++m) {
    const Eigen::RowVectorX<S> b = Z.row(members[m]);
    const S nb = b.norm();
    if (!(nb > S(0))) throw NumericError("cosine similarity with zero-norm member row");
    y(static_cast<Index>(m), 0) = a.dot(b) / (na * nb);
  }
  NodeId out = t.push(std::move(y), t.requires_grad(z), nullptr);
  t.set_pull(out, [z, anchor, members = std::move(members), out](Tape<S>& tt, const auto& g) {
    const auto& Z2 = tt.value(z);
    const auto& cosv = tt.value(out);
    const Eigen::RowVectorX<S> a2 = Z2.row(anchor);
    const S na2 = a2.norm();
    Eigen::RowVectorX<S> ga = Eigen::RowVectorX<S>::Zero(Z2.cols());
    for (std::size_t m = 0; m < members.size(); ++m) {
      const S gm = g(static_cast<Index>(m), 0);
      if (gm == S(0)) continue;
      const Eigen::RowVectorX<S> b = Z2.row(members[m]);
      const S nb = b.norm();
      const S c = cosv(static_cast<Index>(m), 0);
      ga += gm * (b / (na2 * nb) - (c / (na2 * na2)) * a2);
      tt.accumulate_row(z, members[m], (gm * (a2 / (na2 * nb) - (c / (nb * nb)) * b)).eval());
    }
    tt.accumulate_row(z, anchor, ga);
  });
  return out;
}

/// y = log sum_i exp(v[begin+i] * inv_tau) over a slice of a column vector,
/// max-shifted for stability.
template <typename S>
NodeId logsumexp_slice(Tape<S>& t, NodeId vec, Index begin, Index len, S inv_tau) {
  if (len < 1) throw std::invalid_argument("logsumexp over empty slice");
  const auto& v = t.value(vec);
  S m = v(begin, 0) * inv_tau;
  for (Index i = 1; i < len; ++i) m = std::max(m, v(begin + i, 0) * inv_tau);
  S acc = 0;
  for (Index i = 0; i < len; ++i) acc += std::exp(v(begin + i, 0) * inv_tau - m);
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = m + std::log(acc);
  NodeId out = t.push(std::move(y), t.requires_grad(vec), nullptr);
  t.set_pull(out, [vec, begin, len, inv_tau, out](Tape<S>& tt, const auto& g) {
    const auto& v2 = tt.value(vec);
    const S yv = tt.scalar(out);
    typename Tape<S>::Mat gv = Tape<S>::Mat::Zero(v2.rows(), 1);
    for (Index i = 0; i < len; ++i)
      gv(begin + i, 0) = g(0, 0) * inv_tau * std::exp(v2(begin + i, 0) * inv_tau - yv);
    tt.accumulate(vec, gv);
  });
  return out;
}

/// y = log sum_i exp(x_i) over scalar nodes, max-shifted.
template <typename S>
NodeId log_add_exp(Tape<S>& t, std::vector<NodeId> xs) {
  if (xs.empty()) throw std::invalid_argument("log_add_exp of nothing");
  S m = t.scalar(xs[0]);
  bool req = false;
  for (NodeId id : xs) {
    m = std::max(m, t.scalar(id));
    req = req || t.requires_grad(id);
  }
  S acc = 0;
  for (NodeId id : xs) acc += std::exp(t.scalar(id) - m);
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = m + std::log(acc);
  NodeId out = t.push(std::move(y), req, nullptr);
  t.set_pull(out, [xs = std::move(xs), out](Tape<S>& tt, const auto& g) {
    const S yv = tt.scalar(out);
    typename Tape<S>::Mat gi(1, 1);
    for (NodeId id : xs) {
      gi(0, 0) = g(0, 0) * std::exp(tt.scalar(id) - yv);
      tt.accumulate(id, gi);
    }
  });
  return out;
}

/// Mean softmax cross-entropy of row logits against integer labels.
template <typename S>
NodeId softmax_cross_entropy(Tape<S>& t, NodeId logits, std::vector<int> labels) {
  const auto& L = t.value(logits);
  const Index n = L.rows();
  if (static_cast<Index>(labels.size()) != n) throw std::invalid_argument("label count mismatch");
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    S m = L.row(i).maxCoeff();
    S lse = std::log(S((L.row(i).array() - m).exp().sum())) + m;
    acc += static_cast<double>(lse - L(i, labels[static_cast<std::size_t>(i)]));
  }
  typename Tape<S>::Mat y(1, 1);
  y(0, 0) = static_cast<S>(acc / static_cast<double>(n));
  return t.push(std::move(y), t.requires_grad(logits),
                [logits, labels = std::move(labels)](Tape<S>& tt, const auto& g) {
                  const auto& L2 = tt.value(logits);
                  const Index n2 = L2.rows();
                  typename Tape<S>::Mat gl(n2, L2.cols());
                  for (Index i = 0; i < n2; ++i) {
                    S m = L2.row(i).maxCoeff();
                    Eigen::RowVectorX<S> e = (L2.row(i).array() - m).exp();
                    e /= e.sum();
                    e(labels[static_cast<std::size_t>(i)]) -= S(1);
                    gl.row(i) = (g(0, 0) / S(n2)) * e;
                  }
                  tt.accumulate(logits, gl);
                });
}

// --- composite forwards ---------------------------------------------------

/// Tape-recorded GCN forward; mirrors encode() op for op so the two paths
/// produce identical values.
template <typename S>
NodeId encode_on_tape(Tape<S>& t, const SparseMatrix<S>& s_norm, NodeId x,
                      const std::vector<NodeId>& layer_weights, Activation act) {
  NodeId h = x;
  for (std::size_t l = 0; l < layer_weights.size(); ++l) {
    NodeId prop = spmm(t, s_norm, h);
    h = matmul(t, prop, layer_weights[l]);
    if (l + 1 < layer_weights.size()) h = activation(t, h, act);
  }
  return h;
}

/// Tape-recorded projection head; mirrors project().
template <typename S>
NodeId project_on_tape(Tape<S>& t, NodeId h, NodeId w1, NodeId b1, NodeId w2, NodeId b2,
                       Activation act) {
  NodeId z = add_row_broadcast(t, matmul(t, h, w1), b1);
  z = activation(t, z, act);
  return add_row_broadcast(t, matmul(t, z, w2), b2);
}

}  // namespace gscl
