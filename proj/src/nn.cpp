#include "lpdgcn/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "lpdgcn/rng.hpp"

namespace lpdgcn {

template <typename T>
ParamId ParamStore<T>::add(std::string name, Matrix<T> value) {
  if (find(name)) throw std::invalid_argument("ParamStore: duplicate parameter " + name);
  names.push_back(std::move(name));
  values.push_back(std::move(value));
  return values.size() - 1;
}

template <typename T>
std::optional<ParamId> ParamStore<T>::find(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

template <typename T>
std::size_t ParamStore<T>::scalar_count() const {
  std::size_t n = 0;
  for (const auto& v : values) n += v.size();
  return n;
}

template <typename T>
Bound<T> bind(ad::Tape<T>& tape, const ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats,
              Mode mode) {
  Bound<T> b;
  b.tape = &tape;
  b.bn_stats = &bn_stats;
  b.mode = mode;
  b.vars.reserve(store.size());
  for (const auto& v : store.values) b.vars.push_back(tape.leaf(v, mode == Mode::train));
  return b;
}

template <typename T>
Matrix<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed, const std::string& name) {
  Rng rng(derive_seed({seed, hash_name(name)}));
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix<T> m(fan_in, fan_out);
  for (auto& v : m.flat()) v = static_cast<T>(rng.uniform(-bound, bound));
  return m;
}

template <typename T>
Mlp add_mlp(ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats, const std::string& prefix,
            std::size_t in, std::size_t hidden, std::size_t out, bool with_bn, std::uint64_t seed,
            double bn_momentum, double bn_eps) {
  if (in == 0 || hidden == 0 || out == 0) throw std::invalid_argument("add_mlp: zero width in " + prefix);
  Mlp m;
  m.in = in;
  m.hidden = hidden;
  m.out = out;
  m.w1 = store.add(prefix + ".w1", glorot_uniform<T>(in, hidden, seed, prefix + ".w1"));
  m.b1 = store.add(prefix + ".b1", Matrix<T>(1, hidden));
  m.w2 = store.add(prefix + ".w2", glorot_uniform<T>(hidden, out, seed, prefix + ".w2"));
  if (with_bn) {
    BatchNormLayout bn;
    bn.gamma = store.add(prefix + ".bn.gamma", Matrix<T>(1, out, T(1)));
    bn.beta = store.add(prefix + ".bn.beta", Matrix<T>(1, out, T(0)));
    bn.stats = bn_stats.size();
    bn_stats.emplace_back(out, bn_momentum, bn_eps);
    m.bn = bn;
  } else {
    m.b2 = store.add(prefix + ".b2", Matrix<T>(1, out));
  }
  return m;
}

template <typename T>
ad::Var<T> mlp_forward(const Mlp& mlp, const Bound<T>& p, const ad::Var<T>& x) {
  if (x.cols() != mlp.in)
    throw std::invalid_argument("mlp_forward: input width " + std::to_string(x.cols()) + ", expected " +
                                std::to_string(mlp.in));
  auto h = ad::relu(ad::linear(x, p[mlp.w1], p[mlp.b1]));
  if (!mlp.bn) return ad::linear(h, p[mlp.w2], p[*mlp.b2]);
  auto z = ad::matmul(h, p[mlp.w2]);
  z = ad::batch_norm(z, p[mlp.bn->gamma], p[mlp.bn->beta], p.bn_stats->at(mlp.bn->stats), p.mode);
  return ad::relu(z);
}

#define LPDGCN_INSTANTIATE_NN(T)                                                                              \
  template struct ParamStore<T>;                                                                              \
  template Bound<T> bind(ad::Tape<T>&, const ParamStore<T>&, std::vector<BatchNormStats<T>>&, Mode);          \
  template Matrix<T> glorot_uniform<T>(std::size_t, std::size_t, std::uint64_t, const std::string&);          \
  template Mlp add_mlp(ParamStore<T>&, std::vector<BatchNormStats<T>>&, const std::string&, std::size_t,      \
                       std::size_t, std::size_t, bool, std::uint64_t, double, double);                        \
  template ad::Var<T> mlp_forward(const Mlp&, const Bound<T>&, const ad::Var<T>&);

LPDGCN_INSTANTIATE_NN(float)
LPDGCN_INSTANTIATE_NN(double)
LPDGCN_INSTANTIATE_NN(long double)

}  // namespace lpdgcn
