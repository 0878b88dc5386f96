#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpdgcn/graph_io.hpp"
#include "lpdgcn/nn.hpp"

namespace lpdgcn {

enum class Architecture { lpdgcn, gin };
enum class ReconstructionKind { one_hot, continuous };
enum class Activation { relu, identity };

struct ModelConfig {
  Architecture arch = Architecture::lpdgcn;
  /// Number of graph convolution layers K; h[0] is the input features.
  std::size_t layers = 5;
  std::size_t hidden = 64;       // d_h
  std::size_t readout_dim = 64;  // d_o
  std::size_t decoder_hidden = 64;
  std::size_t num_classes = 2;
  std::size_t input_width = 7;  // d_i; equals T for one-hot node labels
  bool use_lfr = true;          // local feature reconstruction (decoder + L_LFR)
  bool use_dc = true;           // dense connections
  bool use_gca = true;          // global context-aware concatenation
  double lambda = 0.2;
  double dropout = 0.5;
  /// Also drop units of every conv layer's output, not only of the final graph vector.
  bool conv_dropout = false;
  /// Initial value of every context scale softplus(eps_raw); must be positive.
  double context_scale_init = 1.0;
  /// Batch-normalise each readout MLP's output (over the graphs of a batch).
  bool readout_bn = true;
  ReconstructionKind reconstruction = ReconstructionKind::one_hot;
  Activation attention_activation = Activation::relu;
  double bn_momentum = 0.1;
  double bn_eps = 1e-5;

  void validate() const;
  /// Input width of the conv MLP of layer k (1-based).
  std::size_t conv_input_width(std::size_t k) const;
};

/// Learnable state of the LPD-GCN. Index k-1 of `conv` / `readout` is layer k;
/// index k-2 of `eps_raw` is the context scale of layer k >= 2 (softplus of
/// the stored value).
template <typename T>
struct ModelParams {
  ParamStore<T> store;
  std::vector<BatchNormStats<T>> bn_stats;
  std::vector<Mlp> conv;
  std::vector<Mlp> readout;
  std::vector<ParamId> eps_raw;
  /// Attention matrices, stored for row-vector products (h * W).
  ParamId attn_w1 = 0;
  ParamId attn_w2 = 0;
  std::optional<Mlp> decoder;
  ParamId cls_w = 0;
  ParamId cls_b = 0;
};

/// Glorot-uniform weights, zero biases, unit batch-norm scale, context scales
/// initialised to softplus(raw) = 1. Deterministic in (config, seed).
template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed);

/// Batch inputs placed on a tape once per forward pass.
template <typename T>
struct BatchInputs {
  const GraphBatch* batch = nullptr;
  ad::Var<T> x;
};

template <typename T>
BatchInputs<T> put_batch(ad::Tape<T>& tape, const GraphBatch& batch);

template <typename T>
struct ForwardArtifacts {
  std::vector<ad::Var<T>> h;   // h[0] = X, h[k] for k = 1..K
  std::vector<ad::Var<T>> a;   // a[k-1]: neighbourhood aggregate fed to layer k
  std::vector<ad::Var<T>> hg;  // hg[k-1]: readout of layer k, [B x d_o]
  ad::Var<T> alpha;            // [B x K]
  ad::Var<T> hg_final;         // [B x d_o]
  ad::Var<T> class_logits;     // [B x C]
  std::optional<ad::Var<T>> recon_logits;  // [N_B x d_i]
  ad::Var<T> loss_gc;
  std::optional<ad::Var<T>> loss_lfr;
  ad::Var<T> loss;
};

template <typename T>
struct ConvOutput {
  ad::Var<T> aggregate;
  ad::Var<T> embedding;
};

/// Layer k >= 1. `h` holds h[0..k-1]; `hg_prev` is the readout of layer k-1
/// (required when k >= 2 and the context-aware path is enabled).
template <typename T>
ConvOutput<T> conv_layer(std::size_t k, std::span<const ad::Var<T>> h, const std::optional<ad::Var<T>>& hg_prev,
                         const BatchInputs<T>& in, const ModelParams<T>& params, const Bound<T>& bound,
                         const ModelConfig& config, Rng& rng);

/// Readout of layer k: MLP of the per-graph sum of h[1..k] (or of h[k] alone
/// without dense connections). `h` holds h[0..k].
template <typename T>
ad::Var<T> readout(std::size_t k, std::span<const ad::Var<T>> h, const BatchInputs<T>& in,
                   const ModelParams<T>& params, const Bound<T>& bound, const ModelConfig& config);

template <typename T>
struct AttentionOutput {
  ad::Var<T> hg_final;
  ad::Var<T> alpha;
};

/// Layer attention. Per graph and layer, the score is the component sum of
/// sigma(hg[k] W1) W2; alpha is the softmax of the scores across layers and
/// the result is sigma(sum_k alpha_k hg[k] W1).
template <typename T>
AttentionOutput<T> attention_aggregate(std::span<const ad::Var<T>> hg, const ad::Var<T>& w1, const ad::Var<T>& w2,
                                       Activation activation = Activation::relu);

/// Decoder input per node: [sum_{i=1..K} h_v^(i) || hg_K(graph(v))].
template <typename T>
ad::Var<T> decode_node_features(std::span<const ad::Var<T>> h, const ad::Var<T>& hg_last, const BatchInputs<T>& in,
                                const ModelParams<T>& params, const Bound<T>& bound, const ModelConfig& config);

template <typename T>
ad::Var<T> classification_loss(const ad::Var<T>& class_logits, std::span<const std::size_t> labels);

/// One-hot kind: cross-entropy of the reconstruction logits against each
/// node's label, summed over all nodes. Continuous kind: RMSE over nodes.
template <typename T>
ad::Var<T> reconstruction_loss(const ad::Var<T>& recon, const GraphBatch& batch, ReconstructionKind kind);

/// L_GC + lambda * L_LFR. With lambda == 0 (or no L_LFR) returns L_GC itself.
template <typename T>
ad::Var<T> total_loss(const ad::Var<T>& loss_gc, const std::optional<ad::Var<T>>& loss_lfr, double lambda);

/// Full pipeline. The mode is taken from `bound`; `rng` drives dropout.
template <typename T>
ForwardArtifacts<T> model_forward(const GraphBatch& batch, const ModelParams<T>& params, const Bound<T>& bound,
                                  const ModelConfig& config, Rng& rng);

// ---------------------------------------------------------------------------
// GIN baseline

template <typename T>
struct GinParams {
  ParamStore<T> store;
  std::vector<BatchNormStats<T>> bn_stats;
  std::vector<Mlp> conv;
  std::vector<ParamId> eps;  // unconstrained, initialised to 0
  ParamId cls_w = 0;
  ParamId cls_b = 0;
};

template <typename T>
GinParams<T> init_gin_params(const ModelConfig& config, std::uint64_t seed);

template <typename T>
struct GinArtifacts {
  std::vector<ad::Var<T>> h;  // h[0..K]
  ad::Var<T> readout;         // [B x (d_i + K d_h)]
  ad::Var<T> class_logits;
  ad::Var<T> loss_gc;
};

/// h^(k) = MLP_k((1 + eps_k) h^(k-1) + sum of neighbours), readout is the
/// concatenation of per-graph sums of h^(0..K), then a linear classifier.
template <typename T>
GinArtifacts<T> gin_forward(const GraphBatch& batch, const GinParams<T>& params, const Bound<T>& bound,
                            const ModelConfig& config, Rng& rng);

const char* to_string(Architecture a);
const char* to_string(ReconstructionKind k);
const char* to_string(Activation a);

}  // namespace lpdgcn
