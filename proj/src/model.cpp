#include "lpdgcn/model.hpp"

#include <cmath>
#include <stdexcept>

namespace lpdgcn {

void ModelConfig::validate() const {
  if (layers < 2) throw std::invalid_argument("layers must be at least 2");
  if (hidden == 0 || readout_dim == 0 || decoder_hidden == 0) throw std::invalid_argument("widths must be positive");
  if (hidden != readout_dim && arch == Architecture::lpdgcn)
    throw std::invalid_argument("hidden and readout_dim must match");
  if (num_classes < 2) throw std::invalid_argument("num_classes must be at least 2");
  if (input_width == 0) throw std::invalid_argument("input_width must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
  if (!(context_scale_init > 0.0)) throw std::invalid_argument("context_scale_init must be positive");
}

std::size_t ModelConfig::conv_input_width(std::size_t k) const {
  if (k == 1) return input_width;
  return use_gca ? hidden + readout_dim : hidden;
}

template <typename T>
ModelParams<T> init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams<T> p;
  const auto K = config.layers;
  for (std::size_t k = 1; k <= K; ++k) {
    const auto name = "conv." + std::to_string(k);
    p.conv.push_back(add_mlp(p.store, p.bn_stats, name, config.conv_input_width(k), config.hidden, config.hidden,
                             true, seed, config.bn_momentum, config.bn_eps));
  }
  for (std::size_t k = 1; k <= K; ++k) {
    const auto name = "readout." + std::to_string(k);
    p.readout.push_back(add_mlp(p.store, p.bn_stats, name, config.hidden, config.hidden, config.readout_dim, config.readout_bn,
                                seed));
  }
  if (config.use_gca) {
    // softplus(log(e - 1)) == 1
    const T raw = static_cast<T>(std::log(std::expm1(config.context_scale_init)));
    for (std::size_t k = 2; k <= K; ++k)
      p.eps_raw.push_back(p.store.add("context_scale." + std::to_string(k), Matrix<T>::scalar(raw)));
  }
  const auto d_o = config.readout_dim;
  p.attn_w1 = p.store.add("attention.w1", glorot_uniform<T>(d_o, d_o, seed, "attention.w1"));
  p.attn_w2 = p.store.add("attention.w2", glorot_uniform<T>(d_o, d_o, seed, "attention.w2"));
  if (config.use_lfr)
    p.decoder = add_mlp(p.store, p.bn_stats, "decoder", config.hidden + d_o, config.decoder_hidden,
                        config.input_width, false, seed);
  p.cls_w = p.store.add("classifier.w", glorot_uniform<T>(d_o, config.num_classes, seed, "classifier.w"));
  p.cls_b = p.store.add("classifier.b", Matrix<T>(1, config.num_classes));
  return p;
}

template <typename T>
BatchInputs<T> put_batch(ad::Tape<T>& tape, const GraphBatch& batch) {
  return {&batch, tape.constant(cast<T>(batch.x))};
}

namespace {

/// h[first] + ... + h[last].
template <typename T>
ad::Var<T> layer_sum(std::span<const ad::Var<T>> h, std::size_t first, std::size_t last) {
  auto acc = h[first];
  for (std::size_t i = first + 1; i <= last; ++i) acc = ad::add(acc, h[i]);
  return acc;
}

template <typename T>
ad::Var<T> activate(const ad::Var<T>& x, Activation a) {
  return a == Activation::relu ? ad::relu(x) : x;
}

}  // namespace

template <typename T>
ConvOutput<T> conv_layer(std::size_t k, std::span<const ad::Var<T>> h, const std::optional<ad::Var<T>>& hg_prev,
                         const BatchInputs<T>& in, const ModelParams<T>& params, const Bound<T>& bound,
                         const ModelConfig& config, Rng& rng) {
  if (k < 1 || k > params.conv.size()) throw std::out_of_range("conv_layer: layer " + std::to_string(k));
  if (h.size() < k) throw std::invalid_argument("conv_layer: layer " + std::to_string(k) + " needs h[0.." +
                                                std::to_string(k - 1) + "]");
  const auto& batch = *in.batch;

  // Neighbour sums are linear, so summing the layers first is the same as
  // summing the per-layer aggregates.
  ad::Var<T> source = (k == 1 || !config.use_dc) ? h[k - 1] : layer_sum(h, 1, k - 1);
  ad::Var<T> aggregate = ad::neighbor_sum(source, std::span<const DirectedEdge>(batch.directed_edges));

  ad::Var<T> input = aggregate;
  if (k >= 2 && config.use_gca) {
    if (!hg_prev) throw std::invalid_argument("conv_layer: layer " + std::to_string(k) + " needs the previous readout");
    const auto scale = ad::softplus(bound[params.eps_raw.at(k - 2)]);
    const auto context = ad::gather_rows(ad::scale(*hg_prev, scale), std::span<const std::size_t>(batch.node_graph_id));
    input = ad::concat_features(aggregate, context);
  }
  auto out = mlp_forward(params.conv[k - 1], bound, input);
  if (config.conv_dropout) out = ad::dropout(out, config.dropout, bound.mode, rng);
  return {aggregate, out};
}

template <typename T>
ad::Var<T> readout(std::size_t k, std::span<const ad::Var<T>> h, const BatchInputs<T>& in,
                   const ModelParams<T>& params, const Bound<T>& bound, const ModelConfig& config) {
  if (k < 1 || k > params.readout.size()) throw std::out_of_range("readout: layer " + std::to_string(k));
  if (h.size() <= k) throw std::invalid_argument("readout: layer " + std::to_string(k) + " needs h[1.." +
                                                 std::to_string(k) + "]");
  const auto& batch = *in.batch;
  const auto source = config.use_dc ? layer_sum(h, 1, k) : h[k];
  const auto pooled =
      ad::segment_sum(source, std::span<const std::size_t>(batch.node_graph_id), batch.num_graphs);
  return mlp_forward(params.readout[k - 1], bound, pooled);
}

template <typename T>
AttentionOutput<T> attention_aggregate(std::span<const ad::Var<T>> hg, const ad::Var<T>& w1, const ad::Var<T>& w2,
                                       Activation activation) {
  if (hg.empty()) throw std::invalid_argument("attention_aggregate: no layers");
  std::vector<ad::Var<T>> projected;
  projected.reserve(hg.size());
  ad::Var<T> scores;
  for (std::size_t k = 0; k < hg.size(); ++k) {
    if (hg[k].rows() != hg[0].rows() || hg[k].cols() != hg[0].cols())
      throw std::invalid_argument("attention_aggregate: layer readouts differ in shape");
    projected.push_back(ad::matmul(hg[k], w1));
    const auto s = ad::row_sum(ad::matmul(activate(projected.back(), activation), w2));
    scores = k == 0 ? s : ad::concat_features(scores, s);
  }
  const auto alpha = ad::softmax_rows(scores);
  ad::Var<T> mixed = ad::scale_rows(projected[0], ad::column(alpha, 0));
  for (std::size_t k = 1; k < hg.size(); ++k)
    mixed = ad::add(mixed, ad::scale_rows(projected[k], ad::column(alpha, k)));
  return {activate(mixed, activation), alpha};
}

template <typename T>
ad::Var<T> decode_node_features(std::span<const ad::Var<T>> h, const ad::Var<T>& hg_last, const BatchInputs<T>& in,
                                const ModelParams<T>& params, const Bound<T>& bound, const ModelConfig& config) {
  if (!config.use_lfr || !params.decoder)
    throw std::logic_error("decode_node_features: reconstruction is disabled for this model");
  if (h.size() < 2) throw std::invalid_argument("decode_node_features: no hidden layers");
  const auto& batch = *in.batch;
  const auto local = layer_sum(h, 1, h.size() - 1);
  const auto context = ad::gather_rows(hg_last, std::span<const std::size_t>(batch.node_graph_id));
  return mlp_forward(*params.decoder, bound, ad::concat_features(local, context));
}

template <typename T>
ad::Var<T> classification_loss(const ad::Var<T>& class_logits, std::span<const std::size_t> labels) {
  return ad::softmax_cross_entropy(class_logits, labels);
}

template <typename T>
ad::Var<T> reconstruction_loss(const ad::Var<T>& recon, const GraphBatch& batch, ReconstructionKind kind) {
  const auto& x = batch.x;
  if (recon.rows() != x.rows() || recon.cols() != x.cols())
    throw std::invalid_argument("reconstruction_loss: reconstruction " + recon.value().shape_string() +
                                " vs features " + x.shape_string());
  if (kind == ReconstructionKind::continuous) return ad::rmse(recon, cast<T>(x));

  std::vector<std::size_t> targets(x.rows());
  for (std::size_t v = 0; v < x.rows(); ++v) {
    std::size_t hot = x.cols();
    double total = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      total += x(v, c);
      if (x(v, c) == 1.0) hot = c;
    }
    if (hot == x.cols() || total != 1.0)
      throw std::invalid_argument("reconstruction_loss: one-hot kind but feature row " + std::to_string(v) +
                                  " is not one-hot");
    targets[v] = hot;
  }
  return ad::softmax_cross_entropy(recon, std::span<const std::size_t>(targets));
}

template <typename T>
ad::Var<T> total_loss(const ad::Var<T>& loss_gc, const std::optional<ad::Var<T>>& loss_lfr, double lambda) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("total_loss: lambda must be non-negative");
  if (!loss_lfr || lambda == 0.0) return loss_gc;
  return ad::add(loss_gc, ad::scale(*loss_lfr, lambda));
}

template <typename T>
ForwardArtifacts<T> model_forward(const GraphBatch& batch, const ModelParams<T>& params, const Bound<T>& bound,
                                  const ModelConfig& config, Rng& rng) {
  if (batch.x.cols() != config.input_width)
    throw std::invalid_argument("model_forward: feature width " + std::to_string(batch.x.cols()) + ", expected " +
                                std::to_string(config.input_width));
  const auto in = put_batch(*bound.tape, batch);
  ForwardArtifacts<T> out;
  out.h.push_back(in.x);
  std::optional<ad::Var<T>> hg_prev;
  for (std::size_t k = 1; k <= config.layers; ++k) {
    auto conv = conv_layer<T>(k, out.h, hg_prev, in, params, bound, config, rng);
    out.a.push_back(conv.aggregate);
    out.h.push_back(conv.embedding);
    out.hg.push_back(readout<T>(k, out.h, in, params, bound, config));
    hg_prev = out.hg.back();
  }
  auto att = attention_aggregate<T>(out.hg, bound[params.attn_w1], bound[params.attn_w2], config.attention_activation);
  out.alpha = att.alpha;
  out.hg_final = att.hg_final;
  const auto features = ad::dropout(out.hg_final, config.dropout, bound.mode, rng);
  out.class_logits = ad::linear(features, bound[params.cls_w], bound[params.cls_b]);
  out.loss_gc = classification_loss(out.class_logits, std::span<const std::size_t>(batch.labels));
  if (config.use_lfr) {
    out.recon_logits = decode_node_features<T>(out.h, out.hg.back(), in, params, bound, config);
    out.loss_lfr = reconstruction_loss(*out.recon_logits, batch, config.reconstruction);
  }
  out.loss = total_loss(out.loss_gc, out.loss_lfr, config.lambda);
  return out;
}

const char* to_string(Architecture a) { return a == Architecture::lpdgcn ? "lpdgcn" : "gin"; }
const char* to_string(ReconstructionKind k) { return k == ReconstructionKind::one_hot ? "onehot" : "continuous"; }
const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

#define LPDGCN_INSTANTIATE_MODEL(T)                                                                                   \
  template ModelParams<T> init_params<T>(const ModelConfig&, std::uint64_t);                                          \
  template BatchInputs<T> put_batch(ad::Tape<T>&, const GraphBatch&);                                                 \
  template ConvOutput<T> conv_layer(std::size_t, std::span<const ad::Var<T>>, const std::optional<ad::Var<T>>&,       \
                                    const BatchInputs<T>&, const ModelParams<T>&, const Bound<T>&,                    \
                                    const ModelConfig&, Rng&);                                                        \
  template ad::Var<T> readout(std::size_t, std::span<const ad::Var<T>>, const BatchInputs<T>&, const ModelParams<T>&, \
                              const Bound<T>&, const ModelConfig&);                                                   \
  template AttentionOutput<T> attention_aggregate(std::span<const ad::Var<T>>, const ad::Var<T>&,                     \
                                                  const ad::Var<T>&, Activation);                                     \
  template ad::Var<T> decode_node_features(std::span<const ad::Var<T>>, const ad::Var<T>&, const BatchInputs<T>&,     \
                                           const ModelParams<T>&, const Bound<T>&, const ModelConfig&);               \
  template ad::Var<T> classification_loss(const ad::Var<T>&, std::span<const std::size_t>);                           \
  template ad::Var<T> reconstruction_loss(const ad::Var<T>&, const GraphBatch&, ReconstructionKind);                  \
  template ad::Var<T> total_loss(const ad::Var<T>&, const std::optional<ad::Var<T>>&, double);                        \
  template ForwardArtifacts<T> model_forward(const GraphBatch&, const ModelParams<T>&, const Bound<T>&,               \
                                             const ModelConfig&, Rng&);

LPDGCN_INSTANTIATE_MODEL(float)
LPDGCN_INSTANTIATE_MODEL(double)
LPDGCN_INSTANTIATE_MODEL(long double)

}  // namespace lpdgcn
