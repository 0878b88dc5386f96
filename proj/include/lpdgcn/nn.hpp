#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpdgcn/ops.hpp"

namespace lpdgcn {

using ParamId = std::size_t;

/// Flat, ordered collection of named learnable arrays. Modules refer to their
/// arrays by ParamId, which is also the position of the bound Var on a tape.
template <typename T>
struct ParamStore {
  std::vector<std::string> names;
  std::vector<Matrix<T>> values;

  ParamId add(std::string name, Matrix<T> value);
  std::optional<ParamId> find(const std::string& name) const;
  std::size_t size() const { return values.size(); }
  std::size_t scalar_count() const;
};

struct BatchNormLayout {
  ParamId gamma = 0;
  ParamId beta = 0;
  std::size_t stats = 0;  // index into the owner's BatchNormStats list
};

/// Two-layer perceptron: linear -> ReLU -> linear, optionally followed by
/// batch norm and ReLU. With batch norm attached the second linear carries no
/// bias (the norm's shift takes its place).
struct Mlp {
  ParamId w1 = 0, b1 = 0, w2 = 0;
  std::optional<ParamId> b2;
  std::optional<BatchNormLayout> bn;
  std::size_t in = 0, hidden = 0, out = 0;
};

/// Parameters bound to one tape, plus everything a forward pass may mutate.
template <typename T>
struct Bound {
  ad::Tape<T>* tape = nullptr;
  std::vector<ad::Var<T>> vars;
  std::vector<BatchNormStats<T>>* bn_stats = nullptr;
  Mode mode = Mode::eval;

  const ad::Var<T>& operator[](ParamId id) const { return vars.at(id); }
};

/// Puts every stored array on `tape` as a leaf; train mode leaves require
/// gradients, eval mode leaves are constants.
template <typename T>
Bound<T> bind(ad::Tape<T>& tape, const ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats,
              Mode mode);

/// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)). The stream is seeded
/// from (seed, name), so adding or removing other parameters never shifts it.
template <typename T>
Matrix<T> glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::uint64_t seed, const std::string& name);

template <typename T>
Mlp add_mlp(ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats, const std::string& prefix,
            std::size_t in, std::size_t hidden, std::size_t out, bool with_bn, std::uint64_t seed,
            double bn_momentum = 0.1, double bn_eps = 1e-5);

template <typename T>
ad::Var<T> mlp_forward(const Mlp& mlp, const Bound<T>& params, const ad::Var<T>& x);

}  // namespace lpdgcn
