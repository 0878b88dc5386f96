#include "lpdgcn/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace lpdgcn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("invalid value '" + value + "' for " + key + " (expected " + expected + ")");
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "true/false");
}

/// Shortest text that parses back to exactly `v`.
std::string fmt(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

const char* fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
  auto& m = model;
  auto& h = hyper;
  if (key == "dataset_root") dataset_root = value;
  else if (key == "dataset") dataset = value;
  else if (key == "model") {
    if (value == "lpdgcn") m.arch = Architecture::lpdgcn;
    else if (value == "gin") m.arch = Architecture::gin;
    else bad_value(key, value, "lpdgcn|gin");
  } else if (key == "variant") {
    m.use_lfr = m.use_dc = m.use_gca = true;
    if (value == "nolfr") m.use_lfr = false;
    else if (value == "nodc") m.use_dc = false;
    else if (value == "nogca") m.use_gca = false;
    else if (value != "full") bad_value(key, value, "full|nolfr|nodc|nogca");
  } else if (key == "layers") m.layers = to_uint(key, value);
  else if (key == "hidden") m.hidden = to_uint(key, value);
  else if (key == "readout_dim") m.readout_dim = to_uint(key, value);
  else if (key == "decoder_hidden") m.decoder_hidden = to_uint(key, value);
  else if (key == "use_lfr") m.use_lfr = to_bool(key, value);
  else if (key == "use_dc") m.use_dc = to_bool(key, value);
  else if (key == "use_gca") m.use_gca = to_bool(key, value);
  else if (key == "conv_dropout") m.conv_dropout = to_bool(key, value);
  else if (key == "readout_bn") m.readout_bn = to_bool(key, value);
  else if (key == "context_scale_init") m.context_scale_init = to_double(key, value);
  else if (key == "lambda") h.lambda = to_double(key, value);
  else if (key == "dropout") h.dropout_p = to_double(key, value);
  else if (key == "reconstruction") {
    if (value == "onehot") m.reconstruction = ReconstructionKind::one_hot;
    else if (value == "continuous") m.reconstruction = ReconstructionKind::continuous;
    else bad_value(key, value, "onehot|continuous");
  } else if (key == "attention_activation") {
    if (value == "relu") m.attention_activation = Activation::relu;
    else if (value == "identity") m.attention_activation = Activation::identity;
    else bad_value(key, value, "relu|identity");
  } else if (key == "bn_momentum") m.bn_momentum = to_double(key, value);
  else if (key == "bn_eps") m.bn_eps = to_double(key, value);
  else if (key == "lr") h.base_lr = to_double(key, value);
  else if (key == "lr_decay") h.decay_factor = to_double(key, value);
  else if (key == "lr_decay_every") h.decay_every = to_uint(key, value);
  else if (key == "epochs") h.epochs = to_uint(key, value);
  else if (key == "batch_size") h.batch_size = to_uint(key, value);
  else if (key == "seed") h.seed = to_uint(key, value);
  else if (key == "adam_beta1") h.adam_beta1 = to_double(key, value);
  else if (key == "adam_beta2") h.adam_beta2 = to_double(key, value);
  else if (key == "adam_eps") h.adam_eps = to_double(key, value);
  else if (key == "folds") folds = to_uint(key, value);
  else if (key == "fold_seed") fold_seed = to_uint(key, value);
  else if (key == "precision") {
    if (value == "float") precision = Precision::f32;
    else if (value == "double") precision = Precision::f64;
    else bad_value(key, value, "float|double");
  } else if (key == "output_dir") output_dir = value;
  else if (key == "jobs") jobs = to_uint(key, value);
  else throw ConfigError("unknown config key '" + key + "'");
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  const auto& m = model;
  const auto& h = hyper;
  return {
      {"dataset_root", dataset_root.string()},
      {"dataset", dataset},
      {"model", to_string(m.arch)},
      {"layers", std::to_string(m.layers)},
      {"hidden", std::to_string(m.hidden)},
      {"readout_dim", std::to_string(m.readout_dim)},
      {"decoder_hidden", std::to_string(m.decoder_hidden)},
      {"use_lfr", fmt(m.use_lfr)},
      {"use_dc", fmt(m.use_dc)},
      {"use_gca", fmt(m.use_gca)},
      {"conv_dropout", fmt(m.conv_dropout)},
      {"readout_bn", fmt(m.readout_bn)},
      {"context_scale_init", fmt(m.context_scale_init)},
      {"lambda", fmt(h.lambda)},
      {"dropout", fmt(h.dropout_p)},
      {"reconstruction", to_string(m.reconstruction)},
      {"attention_activation", to_string(m.attention_activation)},
      {"bn_momentum", fmt(m.bn_momentum)},
      {"bn_eps", fmt(m.bn_eps)},
      {"lr", fmt(h.base_lr)},
      {"lr_decay", fmt(h.decay_factor)},
      {"lr_decay_every", std::to_string(h.decay_every)},
      {"epochs", std::to_string(h.epochs)},
      {"batch_size", std::to_string(h.batch_size)},
      {"seed", std::to_string(h.seed)},
      {"adam_beta1", fmt(h.adam_beta1)},
      {"adam_beta2", fmt(h.adam_beta2)},
      {"adam_eps", fmt(h.adam_eps)},
      {"folds", std::to_string(folds)},
      {"fold_seed", std::to_string(fold_seed)},
      {"precision", precision == Precision::f32 ? "float" : "double"},
      {"output_dir", output_dir.string()},
      {"jobs", std::to_string(jobs)},
  };
}

std::string RunConfig::variant_name() const {
  if (model.arch == Architecture::gin) return "gin";
  std::string name;
  const auto add = [&](bool off, const char* tag) {
    if (!off) return;
    if (!name.empty()) name += "+";
    name += tag;
  };
  add(!model.use_lfr, "nolfr");
  add(!model.use_dc, "nodc");
  add(!model.use_gca, "nogca");
  return name.empty() ? "full" : name;
}

ModelConfig RunConfig::effective_model() const {
  ModelConfig m = model;
  m.lambda = hyper.lambda;
  m.dropout = hyper.dropout_p;
  return m;
}

std::pair<std::string, std::string> split_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + assignment + "'");
  return {std::move(key), trim(assignment.substr(eq + 1))};
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    try {
      const auto [key, value] = split_assignment(line);
      base.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig parse_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config_text(buf.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string format_entries(const RunConfig& config) {
  std::string out;
  for (const auto& [k, v] : config.entries()) out += k + " = " + v + "\n";
  return out;
}

}  // namespace lpdgcn
