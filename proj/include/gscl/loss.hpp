#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gscl/partition.hpp"
#include "gscl/tape.hpp"
#include "gscl/types.hpp"

namespace gscl {

enum class LossVariant { pairwise, listwise, infonce_in_flat, infonce_out_flat };

inline LossVariant loss_variant_from_string(const std::string& s) {
  if (s == "pairwise") return LossVariant::pairwise;
  if (s == "listwise") return LossVariant::listwise;
  if (s == "infonce_in_flat") return LossVariant::infonce_in_flat;
  if (s == "infonce_out_flat") return LossVariant::infonce_out_flat;
  throw std::invalid_argument("unknown loss variant: " + s);
}

inline std::string to_string(LossVariant v) {
  switch (v) {
    case LossVariant::pairwise: return "pairwise";
    case LossVariant::listwise: return "listwise";
    case LossVariant::infonce_in_flat: return "infonce_in_flat";
    case LossVariant::infonce_out_flat: return "infonce_out_flat";
  }
  return "?";
}

/// Tally of critic evaluations theta(.,.) inside one loss evaluation.
struct ScoreCallCounter {
  std::uint64_t calls = 0;
  void reset() { calls = 0; }
};

struct LossConfig {
  int k = 2;
  double tau_base = 0.5;
  /// Temperature for hop h is tau_base + (h-1)*tau_spacing; the beyond bucket
  /// counts as hop k+1.
  double tau_spacing = 0.0;
  double alpha = 0.5;  // pairwise gate
  double beta = 0.5;   // listwise gate
  LossVariant variant = LossVariant::listwise;
  bool count_score_calls = false;
  bool memoize_similarities = true;

  double tau(int hop) const { return tau_base + (hop - 1) * tau_spacing; }

  void validate() const {
    if (k < 1) throw std::invalid_argument("loss k must be >= 1");
    for (int h = 1; h <= k + 1; ++h)
      if (!(tau(h) > 0.0)) throw std::invalid_argument("temperatures must stay positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must be in (0,1)");
  }
};

// --- plain critic and InfoNCE forms ------------------------------------------

template <typename S>
S cosine_sim(const DenseVector<S>& a, const DenseVector<S>& b) {
  const S na = a.norm();
  const S nb = b.norm();
  if (!(na > S(0)) || !(nb > S(0))) throw NumericError("cosine similarity of zero vector");
  return a.dot(b) / (na * nb);
}

namespace detail {

template <typename S>
S logsumexp(const std::vector<S>& xs) {
  S m = xs[0];
  for (S x : xs) m = std::max(m, x);
  S acc = 0;
  for (S x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

template <typename S>
std::vector<S> scaled_sims(const DenseVector<S>& q, const DenseMatrix<S>& rows, S inv_tau) {
  std::vector<S> out;
  out.reserve(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) {
    DenseVector<S> r = rows.row(i).transpose();
    out.push_back(cosine_sim<S>(q, r) * inv_tau);
  }
  return out;
}

}  // namespace detail

/// Classic single-positive InfoNCE with max-shifted log-sum-exp; an empty
/// negative set gives 0.
template <typename S>
S infonce(const DenseVector<S>& q, const DenseVector<S>& p, const DenseMatrix<S>& negatives,
          S tau) {
  if (!(tau > S(0))) throw std::invalid_argument("tau must be positive");
  const S inv = S(1) / tau;
  std::vector<S> logits = detail::scaled_sims<S>(q, negatives, inv);
  const S pos = cosine_sim<S>(q, p) * inv;
  logits.push_back(pos);
  return detail::logsumexp(logits) - pos;
}

/// Multi-positive InfoNCE with the sum over positives outside the log; each
/// term's denominator holds that positive plus all negatives.
template <typename S>
S infonce_out(const DenseVector<S>& q, const DenseMatrix<S>& positives,
              const DenseMatrix<S>& negatives, S tau) {
  if (positives.rows() == 0) throw std::invalid_argument("infonce_out needs positives");
  S acc = 0;
  for (Index i = 0; i < positives.rows(); ++i) {
    DenseVector<S> p = positives.row(i).transpose();
    acc += infonce<S>(q, p, negatives, tau);
  }
  return acc;
}

/// Multi-positive InfoNCE with the sum over positives inside the log; tolerant
/// of noisy positives.
template <typename S>
S infonce_in(const DenseVector<S>& q, const DenseMatrix<S>& positives,
             const DenseMatrix<S>& negatives, S tau) {
  if (positives.rows() == 0) throw std::invalid_argument("infonce_in needs positives");
  if (!(tau > S(0))) throw std::invalid_argument("tau must be positive");
  const S inv = S(1) / tau;
  std::vector<S> pos = detail::scaled_sims<S>(q, positives, inv);
  std::vector<S> all = pos;
  for (S x : detail::scaled_sims<S>(q, negatives, inv)) all.push_back(x);
  return detail::logsumexp(all) - detail::logsumexp(pos);
}

// --- gated ranking losses ----------------------------------------------------

namespace detail {

/// Per-anchor bucket layout inside a concatenated member list.
struct BucketSlices {
  std::vector<Index> members;
  std::vector<Index> offset;  // per hop 1..k+1
  std::vector<Index> len;
};

inline BucketSlices concat_buckets(const HopPartition& p, const std::vector<int>& hops) {
  BucketSlices s;
  s.offset.assign(hops.size(), 0);
  s.len.assign(hops.size(), 0);
  for (std::size_t i = 0; i < hops.size(); ++i) {
    const auto& bucket = p.bucket(hops[i]);
    s.offset[i] = static_cast<Index>(s.members.size());
    s.len[i] = static_cast<Index>(bucket.size());
    s.members.insert(s.members.end(), bucket.begin(), bucket.end());
  }
  return s;
}

template <typename S>
struct AnchorScores {
  NodeId sims;                   // |members| x 1 cosine node
  std::vector<Index> offset;     // per hop 1..k+1 into sims
  std::vector<Index> len;
};

/// Eager per-anchor scoring: every bucket member is scored once.
template <typename S>
AnchorScores<S> score_all_buckets(Tape<S>& t, NodeId z, const HopPartition& p,
                                  ScoreCallCounter* counter) {
  std::vector<int> hops(static_cast<std::size_t>(p.k) + 1);
  for (int h = 1; h <= p.k + 1; ++h) hops[static_cast<std::size_t>(h - 1)] = h;
  BucketSlices s = concat_buckets(p, hops);
  AnchorScores<S> out;
  out.offset = s.offset;
  out.len = s.len;
  if (!s.members.empty()) {
    if (counter) counter->calls += s.members.size();
    out.sims = cosine_rows(t, z, p.anchor, std::move(s.members));
  }
  return out;
}

}  // namespace detail

/// Builds the configured GSCL loss over the given anchors on the tape and
/// returns the scalar node (a sum over anchors; callers scale for batch
/// means). With cfg.memoize_similarities every (anchor, member) pair is scored
/// once; otherwise each ranking group rescoring follows the raw equations,
/// which the ScoreCallCounter instruments.
template <typename S>
NodeId gscl_loss_on_tape(Tape<S>& t, NodeId z, std::span<const HopPartition> partitions,
                         const LossConfig& cfg, ScoreCallCounter* counter = nullptr) {
  cfg.validate();
  ScoreCallCounter* tally = cfg.count_score_calls || counter ? counter : nullptr;
  const S log_alpha = static_cast<S>(std::log(cfg.alpha));
  const S log_beta = static_cast<S>(std::log(cfg.beta));
  const int k = cfg.k;

  std::vector<NodeId> anchor_terms;
  std::size_t total_groups = 0;

  for (const HopPartition& p : partitions) {
    if (p.k != k) throw std::invalid_argument("partition k does not match loss config");
    std::vector<NodeId> terms;  // per-group gated log-ratios (to be negated)

    if (cfg.variant == LossVariant::pairwise || cfg.variant == LossVariant::listwise) {
      std::vector<NodeId> hop_lse(static_cast<std::size_t>(k + 1));
      std::vector<bool> have(static_cast<std::size_t>(k + 1), false);
      if (cfg.memoize_similarities) {
        auto scores = detail::score_all_buckets<S>(t, z, p, tally);
        for (int h = 1; h <= k + 1; ++h) {
          const auto hi = static_cast<std::size_t>(h - 1);
          if (scores.len[hi] > 0) {
            hop_lse[hi] = logsumexp_slice(t, scores.sims, scores.offset[hi], scores.len[hi],
                                          static_cast<S>(1.0 / cfg.tau(h)));
            have[hi] = true;
          }
        }
      }
      auto group_lse = [&](const std::vector<int>& hops) {
        // un-memoized: rescore exactly the buckets this group touches
        detail::BucketSlices s = detail::concat_buckets(p, hops);
        if (tally) tally->calls += s.members.size();
        NodeId sims = cosine_rows(t, z, p.anchor, std::move(s.members));
        std::vector<NodeId> lse(hops.size());
        for (std::size_t i = 0; i < hops.size(); ++i)
          lse[i] = logsumexp_slice(t, sims, s.offset[i], s.len[i],
                                   static_cast<S>(1.0 / cfg.tau(hops[i])));
        return lse;
      };

      if (cfg.variant == LossVariant::pairwise) {
        for (int j = 1; j <= k; ++j) {
          for (int m = 1; m <= k - j + 1; ++m) {
            const int far = j + m;
            if (p.bucket(j).empty() || p.bucket(far).empty()) continue;
            NodeId lj, lf;
            if (cfg.memoize_similarities) {
              lj = hop_lse[static_cast<std::size_t>(j - 1)];
              lf = hop_lse[static_cast<std::size_t>(far - 1)];
            } else {
              auto lse = group_lse({j, far});
              lj = lse[0];
              lf = lse[1];
            }
            NodeId log_ratio = sub(t, lj, log_add_exp(t, {lj, lf}));
            terms.push_back(min_with(t, log_ratio, log_alpha));
          }
        }
      } else {
        for (int j = 1; j <= k; ++j) {
          if (p.bucket(j).empty()) continue;
          std::vector<int> hops{j};
          for (int jp = j + 1; jp <= k + 1; ++jp)
            if (!p.bucket(jp).empty()) hops.push_back(jp);
          std::vector<NodeId> lse;
          if (cfg.memoize_similarities) {
            for (int h : hops) lse.push_back(hop_lse[static_cast<std::size_t>(h - 1)]);
          } else {
            lse = group_lse(hops);
          }
          NodeId log_ratio = sub(t, lse[0], log_add_exp(t, lse));
          terms.push_back(min_with(t, log_ratio, log_beta));
        }
      }
    } else {
      // flat multi-positive variants: hops 1..k pooled as positives (each with
      // its own temperature), the beyond bucket as negatives; no gate
      std::vector<int> pos_hops;
      for (int h = 1; h <= k; ++h)
        if (!p.bucket(h).empty()) pos_hops.push_back(h);
      const bool have_neg = !p.bucket(k + 1).empty();
      if (cfg.memoize_similarities) {
        auto scores = detail::score_all_buckets<S>(t, z, p, tally);
        if (!pos_hops.empty()) {
          std::vector<NodeId> pos_lse;
          for (int h : pos_hops)
            pos_lse.push_back(logsumexp_slice(t, scores.sims,
                                              scores.offset[static_cast<std::size_t>(h - 1)],
                                              scores.len[static_cast<std::size_t>(h - 1)],
                                              static_cast<S>(1.0 / cfg.tau(h))));
          NodeId neg;
          if (have_neg)
            neg = logsumexp_slice(t, scores.sims, scores.offset[static_cast<std::size_t>(k)],
                                  scores.len[static_cast<std::size_t>(k)],
                                  static_cast<S>(1.0 / cfg.tau(k + 1)));
          terms = detail::flat_terms<S>(t, cfg, scores.sims, scores.offset, scores.len, pos_hops,
                                        have_neg, pos_lse, neg);
        }
      } else {
        if (!pos_hops.empty()) {
          std::vector<int> hops = pos_hops;
          if (have_neg) hops.push_back(k + 1);
          detail::BucketSlices s = detail::concat_buckets(p, hops);
          if (tally) tally->calls += s.members.size();
          NodeId sims = cosine_rows(t, z, p.anchor, std::move(s.members));
          std::vector<NodeId> pos_lse;
          std::vector<Index> offset(static_cast<std::size_t>(k + 1), 0),
              len(static_cast<std::size_t>(k + 1), 0);
          for (std::size_t i = 0; i < hops.size(); ++i) {
            offset[static_cast<std::size_t>(hops[i] - 1)] = s.offset[i];
            len[static_cast<std::size_t>(hops[i] - 1)] = s.len[i];
          }
          for (std::size_t i = 0; i < pos_hops.size(); ++i)
            pos_lse.push_back(logsumexp_slice(t, sims, s.offset[i], s.len[i],
                                              static_cast<S>(1.0 / cfg.tau(pos_hops[i]))));
          NodeId neg;
          if (have_neg)
            neg = logsumexp_slice(t, sims, s.offset[pos_hops.size()], s.len[pos_hops.size()],
                                  static_cast<S>(1.0 / cfg.tau(k + 1)));
          terms = detail::flat_terms<S>(t, cfg, sims, offset, len, pos_hops, have_neg, pos_lse,
                                        neg);
        }
      }
    }

    if (terms.empty()) continue;
    total_groups += terms.size();
    const S norm = cfg.variant == LossVariant::pairwise || cfg.variant == LossVariant::listwise
                       ? S(-1) / static_cast<S>(terms.size())
                       : S(-1);
    anchor_terms.push_back(scale(t, sum_of(t, std::move(terms)), norm));
  }

  if (total_groups == 0) throw NumericError("no ranking signal: all hop sets empty");
  return sum_of(t, std::move(anchor_terms));
}

/// Loss value without gradients; shares the tape code path exactly.
template <typename S>
S gscl_loss_value(const DenseMatrix<S>& z, std::span<const HopPartition> partitions,
                  const LossConfig& cfg, ScoreCallCounter* counter = nullptr) {
  Tape<S> t;
  NodeId zc = t.constant(z);
  return t.scalar(gscl_loss_on_tape(t, zc, partitions, cfg, counter));
}

/// Expected number of critic evaluations for one loss evaluation, mirroring
/// the instrumented paths: memoized evaluation scores every bucket member of
/// every anchor once; raw (un-memoized) evaluation rescans the buckets of each
/// valid ranking group.
inline std::uint64_t score_call_count_expected(std::span<const HopPartition> partitions, int k,
                                               LossVariant variant, bool memoized) {
  std::uint64_t total = 0;
  for (const HopPartition& p : partitions) {
    if (memoized) {
      for (int h = 1; h <= k + 1; ++h) total += p.bucket(h).size();
      continue;
    }
    switch (variant) {
      case LossVariant::pairwise:
        for (int j = 1; j <= k; ++j)
          for (int m = 1; m <= k - j + 1; ++m) {
            if (p.bucket(j).empty() || p.bucket(j + m).empty()) continue;
            total += p.bucket(j).size() + p.bucket(j + m).size();
          }
        break;
      case LossVariant::listwise:
        for (int j = 1; j <= k; ++j) {
          if (p.bucket(j).empty()) continue;
          for (int jp = j; jp <= k + 1; ++jp) total += p.bucket(jp).size();
        }
        break;
      case LossVariant::infonce_in_flat:
      case LossVariant::infonce_out_flat: {
        std::size_t pos = 0;
        for (int h = 1; h <= k; ++h) pos += p.bucket(h).size();
        if (pos > 0) total += pos + p.bucket(k + 1).size();
        break;
      }
    }
  }
  return total;
}

}  // namespace gscl
