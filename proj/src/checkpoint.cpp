#include "lpdgcn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

namespace lpdgcn {

namespace {

constexpr const char* kFormat = "lpdgcn-params/1";

template <typename T>
nlohmann::json tensor_json(const Matrix<T>& m) {
  nlohmann::json data = nlohmann::json::array();
  for (auto v : m.flat()) data.push_back(static_cast<double>(v));
  return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

template <typename T>
void read_tensor(const nlohmann::json& tensors, const std::string& name, Matrix<T>& into) {
  if (!tensors.contains(name)) throw std::runtime_error("checkpoint: missing tensor " + name);
  const auto& t = tensors.at(name);
  const auto shape = t.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 2 || shape[0] != into.rows() || shape[1] != into.cols())
    throw std::runtime_error("checkpoint: tensor " + name + " has shape " + t.at("shape").dump() + ", expected " +
                             into.shape_string());
  const auto& data = t.at("data");
  if (data.size() != into.size()) throw std::runtime_error("checkpoint: tensor " + name + " has wrong length");
  for (std::size_t i = 0; i < into.size(); ++i) into[i] = static_cast<T>(data[i].get<double>());
}

std::string stats_name(std::size_t i, const char* field) {
  return "batch_norm." + std::to_string(i) + "." + field;
}

}  // namespace

template <typename T>
nlohmann::json checkpoint_to_json(const ParamStore<T>& store, const std::vector<BatchNormStats<T>>& bn_stats) {
  nlohmann::json tensors = nlohmann::json::object();
  for (std::size_t i = 0; i < store.size(); ++i) tensors[store.names[i]] = tensor_json(store.values[i]);
  for (std::size_t i = 0; i < bn_stats.size(); ++i) {
    tensors[stats_name(i, "running_mean")] = tensor_json(bn_stats[i].running_mean);
    tensors[stats_name(i, "running_var")] = tensor_json(bn_stats[i].running_var);
  }
  return {{"format", kFormat}, {"tensors", std::move(tensors)}};
}

template <typename T>
void checkpoint_from_json(const nlohmann::json& j, ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats) {
  if (j.value("format", std::string()) != kFormat) throw std::runtime_error("checkpoint: unknown format");
  const auto& tensors = j.at("tensors");
  for (std::size_t i = 0; i < store.size(); ++i) read_tensor(tensors, store.names[i], store.values[i]);
  for (std::size_t i = 0; i < bn_stats.size(); ++i) {
    read_tensor(tensors, stats_name(i, "running_mean"), bn_stats[i].running_mean);
    read_tensor(tensors, stats_name(i, "running_var"), bn_stats[i].running_var);
  }
}

template <typename T>
void save_checkpoint(const std::filesystem::path& path, const ParamStore<T>& store,
                     const std::vector<BatchNormStats<T>>& bn_stats) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(store, bn_stats).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing checkpoint " + path.string());
}

template <typename T>
void load_checkpoint(const std::filesystem::path& path, ParamStore<T>& store, std::vector<BatchNormStats<T>>& bn_stats) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint " + path.string());
  checkpoint_from_json(nlohmann::json::parse(in), store, bn_stats);
}

#define LPDGCN_INSTANTIATE_CKPT(T)                                                                               \
  template nlohmann::json checkpoint_to_json(const ParamStore<T>&, const std::vector<BatchNormStats<T>>&);       \
  template void checkpoint_from_json(const nlohmann::json&, ParamStore<T>&, std::vector<BatchNormStats<T>>&);    \
  template void save_checkpoint(const std::filesystem::path&, const ParamStore<T>&,                              \
                                const std::vector<BatchNormStats<T>>&);                                          \
  template void load_checkpoint(const std::filesystem::path&, ParamStore<T>&, std::vector<BatchNormStats<T>>&);

LPDGCN_INSTANTIATE_CKPT(float)
LPDGCN_INSTANTIATE_CKPT(double)

}  // namespace lpdgcn
