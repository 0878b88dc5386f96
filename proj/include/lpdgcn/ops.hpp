#pragma once

#include <cstddef>
#include <span>

#include "lpdgcn/rng.hpp"
#include "lpdgcn/tape.hpp"

namespace lpdgcn {

/// Message direction: row `src` contributes to row `dst`.
struct DirectedEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  bool operator==(const DirectedEdge&) const = default;
};

enum class Mode { train, eval };

/// Running statistics and constants for one batch-norm layer. The learnable
/// scale and shift live with the other parameters and are passed as Vars.
template <typename T>
struct BatchNormStats {
  Matrix<T> running_mean;  // [1 x d]
  Matrix<T> running_var;   // [1 x d]
  double momentum = 0.1;   // new = (1 - momentum) * old + momentum * batch
  double epsilon = 1e-5;

  BatchNormStats() = default;
  explicit BatchNormStats(std::size_t d, double momentum_ = 0.1, double epsilon_ = 1e-5)
      : running_mean(1, d, T(0)), running_var(1, d, T(1)), momentum(momentum_),
        epsilon(epsilon_) {}
};

}  // namespace lpdgcn

namespace lpdgcn::ad {

/// X[N x a] * W[a x b].
template <typename T>
Var<T> matmul(const Var<T>& x, const Var<T>& w);

/// X[N x a] * W[a x b] + b[1 x b] broadcast over rows.
template <typename T>
Var<T> linear(const Var<T>& x, const Var<T>& w, const Var<T>& b);

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b);

/// Multiplies every element by the scalar Var `s`.
template <typename T>
Var<T> scale(const Var<T>& x, const Var<T>& s);

template <typename T>
Var<T> scale(const Var<T>& x, double c);

/// Elementwise max(0, x); the subgradient at 0 is 0.
template <typename T>
Var<T> relu(const Var<T>& x);

/// Elementwise log(1 + exp(x)).
template <typename T>
Var<T> softplus(const Var<T>& x);

/// Row v of the result is the sum of X[u] over edges u -> v. Rows with no
/// incoming edge are zero.
template <typename T>
Var<T> neighbor_sum(const Var<T>& x, std::span<const DirectedEdge> edges);

/// Row g of the result [B x d] is the sum of the rows i with seg[i] == g.
template <typename T>
Var<T> segment_sum(const Var<T>& x, std::span<const std::size_t> seg, std::size_t num_segments);

/// Row i of the result is X[index[i]].
template <typename T>
Var<T> gather_rows(const Var<T>& x, std::span<const std::size_t> index);

/// Horizontal concatenation [A | B].
template <typename T>
Var<T> concat_features(const Var<T>& a, const Var<T>& b);

/// [N x d] -> [N x 1].
template <typename T>
Var<T> row_sum(const Var<T>& x);

/// [N x d] -> [N x 1], column j.
template <typename T>
Var<T> column(const Var<T>& x, std::size_t j);

/// X[N x d] with row i multiplied by c[i], c of shape [N x 1].
template <typename T>
Var<T> scale_rows(const Var<T>& x, const Var<T>& c);

/// Row-wise softmax.
template <typename T>
Var<T> softmax_rows(const Var<T>& x);

/// Sum over rows of -log softmax(logits)[target]. Scalar result.
template <typename T>
Var<T> softmax_cross_entropy(const Var<T>& logits, std::span<const std::size_t> targets);

/// sqrt(sum ||pred_v - target_v||^2 / N). Scalar result.
template <typename T>
Var<T> rmse(const Var<T>& pred, const Matrix<T>& target);

/// Sum of all elements. Scalar result.
template <typename T>
Var<T> sum_all(const Var<T>& x);

/// Batch normalisation over rows. Train mode normalises with the batch mean and
/// biased variance and folds them into `stats` (running variance receives the
/// unbiased estimate); eval mode uses the running statistics.
template <typename T>
Var<T> batch_norm(const Var<T>& x, const Var<T>& gamma, const Var<T>& beta,
                  BatchNormStats<T>& stats, Mode mode);

/// Inverted dropout: in train mode zeroes elements with probability p and
/// scales survivors by 1 / (1 - p). Identity in eval mode.
template <typename T>
Var<T> dropout(const Var<T>& x, double p, Mode mode, Rng& rng);

}  // namespace lpdgcn::ad
