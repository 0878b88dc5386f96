#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "lpdgcn/nn.hpp"

namespace lpdgcn {

/// Parameter checkpoint: a JSON object
///
///   { "format": "lpdgcn-params/1",
///     "tensors": { "<path>": { "shape": [rows, cols], "data": [row-major values] }, ... } }
///
/// Learnable arrays use their ParamStore names; batch-norm running statistics
/// appear as "batch_norm.<i>.running_mean" / ".running_var". Values are written
/// as doubles with round-trip precision, so reloading is bit-exact for double
/// and value-exact for float.
template <typename T>
nlohmann::json checkpoint_to_json(const ParamStore<T>& store, const std::vector<BatchNormStats<T>>& bn_stats);

/// Loads into an existing layout; every tensor must be present with the
/// expected shape.
template <typename T>
void checkpoint_from_json(const nlohmann::json& j, ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats);

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ParamStore<T>& store,
                     const std::vector<BatchNormStats<T>>& bn_stats);

template <typename T>
void load_checkpoint(const std::filesystem::path& path, ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats);

}  // namespace lpdgcn
