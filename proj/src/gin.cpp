#include <stdexcept>

#include "lpdgcn/model.hpp"

namespace lpdgcn {

template <typename T>
GinParams<T> init_gin_params(const ModelConfig& config, std::uint64_t seed) {
  if (config.layers < 1) throw std::invalid_argument("gin: need at least one layer");
  GinParams<T> p;
  for (std::size_t k = 1; k <= config.layers; ++k) {
    const auto name = "gin.conv." + std::to_string(k);
    const auto in = k == 1 ? config.input_width : config.hidden;
    p.conv.push_back(add_mlp(p.store, p.bn_stats, name, in, config.hidden, config.hidden, true, seed,
                             config.bn_momentum, config.bn_eps));
    p.eps.push_back(p.store.add("gin.eps." + std::to_string(k), Matrix<T>::scalar(T(0))));
  }
  const auto width = config.input_width + config.layers * config.hidden;
  p.cls_w = p.store.add("gin.classifier.w", glorot_uniform<T>(width, config.num_classes, seed, "gin.classifier.w"));
  p.cls_b = p.store.add("gin.classifier.b", Matrix<T>(1, config.num_classes));
  return p;
}

template <typename T>
GinArtifacts<T> gin_forward(const GraphBatch& batch, const GinParams<T>& params, const Bound<T>& bound,
                            const ModelConfig& config, Rng& rng) {
  if (batch.x.cols() != config.input_width)
    throw std::invalid_argument("gin_forward: feature width " + std::to_string(batch.x.cols()) + ", expected " +
                                std::to_string(config.input_width));
  const auto in = put_batch(*bound.tape, batch);
  const std::span<const DirectedEdge> edges(batch.directed_edges);
  const std::span<const std::size_t> seg(batch.node_graph_id);

  GinArtifacts<T> out;
  out.h.push_back(in.x);
  ad::Var<T> pooled = ad::segment_sum(in.x, seg, batch.num_graphs);
  for (std::size_t k = 1; k <= params.conv.size(); ++k) {
    const auto& prev = out.h.back();
    // (1 + eps) h + sum of neighbours  ==  h + eps * h + sum of neighbours
    const auto self = ad::add(prev, ad::scale(prev, bound[params.eps[k - 1]]));
    const auto combined = ad::add(self, ad::neighbor_sum(prev, edges));
    out.h.push_back(mlp_forward(params.conv[k - 1], bound, combined));
    pooled = ad::concat_features(pooled, ad::segment_sum(out.h.back(), seg, batch.num_graphs));
  }
  out.readout = pooled;
  const auto features = ad::dropout(pooled, config.dropout, bound.mode, rng);
  out.class_logits = ad::linear(features, bound[params.cls_w], bound[params.cls_b]);
  out.loss_gc = classification_loss(out.class_logits, std::span<const std::size_t>(batch.labels));
  return out;
}

template GinParams<float> init_gin_params<float>(const ModelConfig&, std::uint64_t);
template GinParams<double> init_gin_params<double>(const ModelConfig&, std::uint64_t);
template GinArtifacts<float> gin_forward(const GraphBatch&, const GinParams<float>&, const Bound<float>&,
                                         const ModelConfig&, Rng&);
template GinArtifacts<double> gin_forward(const GraphBatch&, const GinParams<double>&, const Bound<double>&,
                                          const ModelConfig&, Rng&);
template GinParams<long double> init_gin_params<long double>(const ModelConfig&, std::uint64_t);
template GinArtifacts<long double> gin_forward(const GraphBatch&, const GinParams<long double>&,
                                               const Bound<long double>&, const ModelConfig&, Rng&);

}  // namespace lpdgcn
