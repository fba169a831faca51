#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "gscl/rng.hpp"
#include "gscl/types.hpp"

namespace gscl {

struct AdamConfig {
  double lr = 1e-2;
  double weight_decay = 0.0;  // decoupled: applied as lr * wd * param
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename Scalar>
struct AdamState {
  std::vector<DenseMatrix<Scalar>> m;
  std::vector<DenseMatrix<Scalar>> v;
  long step = 0;

  template <typename PtrVec>
  static AdamState like(const PtrVec& params) {
    AdamState s;
    for (const auto* p : params) {
      s.m.push_back(DenseMatrix<Scalar>::Zero(p->rows(), p->cols()));
      s.v.push_back(DenseMatrix<Scalar>::Zero(p->rows(), p->cols()));
    }
    return s;
  }
};

/// Bias-corrected Adam with decoupled weight decay.
template <typename Scalar>
void adam_step(std::vector<DenseMatrix<Scalar>*>& params,
               const std::vector<DenseMatrix<Scalar>>& grads, AdamState<Scalar>& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != state.m.size())
    throw std::invalid_argument("adam: parameter/gradient/state count mismatch");
  state.step += 1;
  const Scalar b1 = static_cast<Scalar>(cfg.beta1);
  const Scalar b2 = static_cast<Scalar>(cfg.beta2);
  const Scalar bc1 = static_cast<Scalar>(1.0 - std::pow(cfg.beta1, state.step));
  const Scalar bc2 = static_cast<Scalar>(1.0 - std::pow(cfg.beta2, state.step));
  const Scalar lr = static_cast<Scalar>(cfg.lr);
  const Scalar wd = static_cast<Scalar>(cfg.weight_decay);
  const Scalar eps = static_cast<Scalar>(cfg.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    const auto& g = grads[i];
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw std::invalid_argument("adam: gradient shape mismatch");
    state.m[i] = b1 * state.m[i] + (Scalar(1) - b1) * g;
    state.v[i] = b2 * state.v[i] + (Scalar(1) - b2) * g.cwiseProduct(g);
    auto mhat = state.m[i] / bc1;
    auto vhat = state.v[i] / bc2;
    p -= lr * (mhat.array() / (vhat.array().sqrt() + eps)).matrix();
    if (wd != Scalar(0)) p -= lr * wd * p;
  }
}

/// Central-difference gradient check over a random subsample of coordinates
/// (at least min_coords, or every coordinate if there are fewer). Returns the
/// max relative error between `analytic` and the finite-difference estimate.
/// The loss closure must read the current parameter values.
inline double finite_diff_check(const std::function<double()>& loss_fn,
                                std::vector<DenseMatrix<double>*> params,
                                const std::vector<DenseMatrix<double>>& analytic,
                                double epsilon = 1e-5, std::size_t min_coords = 200,
                                std::uint64_t seed = 0) {
  if (params.size() != analytic.size())
    throw std::invalid_argument("finite_diff_check: analytic gradient count mismatch");
  struct Coord {
    std::size_t tensor;
    Index i, j;
  };
  std::vector<Coord> all;
  for (std::size_t t = 0; t < params.size(); ++t)
    for (Index i = 0; i < params[t]->rows(); ++i)
      for (Index j = 0; j < params[t]->cols(); ++j) all.push_back({t, i, j});
  Rng rng = fork_rng(seed, 7);
  std::shuffle(all.begin(), all.end(), rng);
  if (all.size() > min_coords) all.resize(min_coords);

  double max_rel = 0.0;
  for (const Coord& c : all) {
    double& x = (*params[c.tensor])(c.i, c.j);
    const double saved = x;
    x = saved + epsilon;
    const double up = loss_fn();
    x = saved - epsilon;
    const double down = loss_fn();
    x = saved;
    if (!std::isfinite(up) || !std::isfinite(down))
      throw NumericError("loss non-finite at perturbed point");
    const double fd = (up - down) / (2.0 * epsilon);
    const double ga = analytic[c.tensor](c.i, c.j);
    const double rel = std::abs(ga - fd) / (std::abs(ga) + std::abs(fd) + 1e-12);
    max_rel = std::max(max_rel, rel);
  }
  return max_rel;
}

}  // namespace gscl
