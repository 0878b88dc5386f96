#pragma once

#include <cstdint>
#include <vector>

#include "lpdgcn/nn.hpp"

namespace lpdgcn {

template <typename T>
struct AdamState {
  std::vector<Matrix<T>> m;
  std::vector<Matrix<T>> v;
  std::uint64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  /// Zero moments shaped like `params`.
  explicit AdamState(const ParamStore<T>& params, double beta1_ = 0.9, double beta2_ = 0.999,
                     double eps_ = 1e-8);
};

/// One bias-corrected Adam update of every parameter in `params`.
template <typename T>
void adam_step(ParamStore<T>& params, const std::vector<Matrix<T>>& grads, AdamState<T>& state, double lr);

/// Training hyperparameters.
struct Hyper {
  double base_lr = 0.01;
  double decay_factor = 0.5;
  std::size_t decay_every = 20;
  std::size_t epochs = 350;
  std::size_t batch_size = 32;
  double dropout_p = 0.5;
  double lambda = 0.2;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

/// base_lr * decay_factor^floor(epoch / decay_every), epochs counted from 0.
double lr_at_epoch(const Hyper& h, std::size_t epoch);

}  // namespace lpdgcn
