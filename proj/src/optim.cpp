#include "lpdgcn/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lpdgcn {

template <typename T>
AdamState<T>::AdamState(const ParamStore<T>& params, double beta1_, double beta2_, double eps_)
    : beta1(beta1_), beta2(beta2_), eps(eps_) {
  m.reserve(params.size());
  v.reserve(params.size());
  for (const auto& p : params.values) {
    m.emplace_back(p.rows(), p.cols());
    v.emplace_back(p.rows(), p.cols());
  }
}

template <typename T>
void adam_step(ParamStore<T>& params, const std::vector<Matrix<T>>& grads, AdamState<T>& state, double lr) {
  if (grads.size() != params.size() || state.m.size() != params.size())
    throw std::invalid_argument("adam_step: " + std::to_string(grads.size()) + " gradients, " +
                                std::to_string(state.m.size()) + " moments for " +
                                std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (!grads[i].same_shape(params.values[i]))
      throw std::invalid_argument("adam_step: gradient " + grads[i].shape_string() + " for parameter " +
                                  params.names[i] + " " + params.values[i].shape_string());

  ++state.t;
  const T b1 = static_cast<T>(state.beta1), b2 = static_cast<T>(state.beta2);
  const T c1 = static_cast<T>(1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
  const T c2 = static_cast<T>(1.0 - std::pow(state.beta2, static_cast<double>(state.t)));
  const T step = static_cast<T>(lr), eps = static_cast<T>(state.eps);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& theta = params.values[i];
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = b1 * m[j] + (T(1) - b1) * g[j];
      v[j] = b2 * v[j] + (T(1) - b2) * g[j] * g[j];
      const T m_hat = m[j] / c1;
      const T v_hat = v[j] / c2;
      theta[j] -= step * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

void Hyper::validate() const {
  if (!(base_lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(decay_factor > 0.0 && decay_factor <= 1.0)) throw std::invalid_argument("lr_decay must be in (0,1]");
  if (decay_every == 0) throw std::invalid_argument("lr_decay_every must be positive");
  if (batch_size < 2) throw std::invalid_argument("batch_size must be at least 2 (batch norm)");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be non-negative");
}

double lr_at_epoch(const Hyper& h, std::size_t epoch) {
  return h.base_lr * std::pow(h.decay_factor, static_cast<double>(epoch / h.decay_every));
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step(ParamStore<float>&, const std::vector<Matrix<float>>&, AdamState<float>&, double);
template void adam_step(ParamStore<double>&, const std::vector<Matrix<double>>&, AdamState<double>&, double);

}  // namespace lpdgcn
