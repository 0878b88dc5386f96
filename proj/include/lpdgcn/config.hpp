#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpdgcn/model.hpp"
#include "lpdgcn/optim.hpp"

namespace lpdgcn {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Precision { f32, f64 };

/// Everything a run needs. Read from a `key = value` file, then overridden by
/// command-line `key=value` pairs. Lines starting with '#' are comments.
struct RunConfig {
  std::filesystem::path dataset_root = "data/MUTAG";
  std::string dataset = "MUTAG";
  ModelConfig model;
  Hyper hyper;
  std::size_t folds = 10;
  std::uint64_t fold_seed = 0;
  Precision precision = Precision::f32;
  std::filesystem::path output_dir = "runs";
  std::size_t jobs = 1;

  /// Applies one assignment; unknown keys and malformed values throw ConfigError.
  void set(const std::string& key, const std::string& value);

  /// Every key with its effective value, in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;

  /// Short name of the enabled model variant: full, nolfr, nodc, nogca,
  /// a '+'-joined combination, or gin.
  std::string variant_name() const;

  /// Model config with lambda and dropout taken from the hyperparameters.
  ModelConfig effective_model() const;
};

RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base = {});

/// "key=value" -> (key, value), whitespace-trimmed.
std::pair<std::string, std::string> split_assignment(const std::string& assignment);

std::string format_entries(const RunConfig& config);

}  // namespace lpdgcn
