#include "lpdgcn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lpdgcn/checkpoint.hpp"
#include "lpdgcn/model.hpp"
#include "lpdgcn/optim.hpp"
#include "lpdgcn/rng.hpp"
#include "lpdgcn/stats.hpp"

namespace lpdgcn {

void AttentionCheck::merge(const AttentionCheck& o) {
  forward_passes += o.forward_passes;
  max_sum_deviation = std::max(max_sum_deviation, o.max_sum_deviation);
  min_alpha = std::min(min_alpha, o.min_alpha);
}

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kShuffleStream = 0x5aff;
constexpr std::uint64_t kDropoutStream = 0xd209;
constexpr std::size_t kEvalChunk = 128;

/// Either model family behind one interface.
template <typename T>
class Network {
 public:
  Network(const ModelConfig& config, std::uint64_t seed) : config_(config) {
    if (config.arch == Architecture::gin) gin_ = init_gin_params<T>(config, seed);
    else lpd_ = init_params<T>(config, seed);
  }

  ParamStore<T>& store() { return lpd_ ? lpd_->store : gin_->store; }
  std::vector<BatchNormStats<T>>& bn_stats() { return lpd_ ? lpd_->bn_stats : gin_->bn_stats; }

  struct Pass {
    ad::Var<T> loss;
    ad::Var<T> loss_gc;
    std::optional<ad::Var<T>> loss_lfr;
    ad::Var<T> logits;
    std::optional<ad::Var<T>> alpha;
  };

  /// The decoder is skipped entirely when its loss carries no weight.
  Pass forward(const GraphBatch& batch, const Bound<T>& bound, Rng& rng) const {
    if (gin_) {
      auto out = gin_forward<T>(batch, *gin_, bound, config_, rng);
      return {out.loss_gc, out.loss_gc, std::nullopt, out.class_logits, std::nullopt};
    }
    ModelConfig cfg = config_;
    cfg.use_lfr = cfg.use_lfr && cfg.lambda != 0.0;
    auto out = model_forward<T>(batch, *lpd_, bound, cfg, rng);
    return {out.loss, out.loss_gc, out.loss_lfr, out.class_logits, out.alpha};
  }

 private:
  ModelConfig config_;
  std::optional<ModelParams<T>> lpd_;
  std::optional<GinParams<T>> gin_;
};

template <typename T>
void observe_alpha(const Matrix<T>& alpha, AttentionCheck& check) {
  ++check.forward_passes;
  for (std::size_t r = 0; r < alpha.rows(); ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < alpha.cols(); ++c) {
      sum += static_cast<double>(alpha(r, c));
      check.min_alpha = std::min(check.min_alpha, static_cast<double>(alpha(r, c)));
    }
    check.max_sum_deviation = std::max(check.max_sum_deviation, std::abs(sum - 1.0));
  }
}

template <typename T>
std::size_t count_correct(const Matrix<T>& logits, std::span<const std::size_t> labels) {
  std::size_t correct = 0;
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best == labels[r]) ++correct;
  }
  return correct;
}

template <typename T>
double evaluate(Network<T>& net, const Dataset& ds, std::span<const std::size_t> indices, AttentionCheck& check) {
  if (indices.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t correct = 0;
  Rng unused(0);
  for (std::size_t start = 0; start < indices.size(); start += kEvalChunk) {
    const auto chunk = indices.subspan(start, std::min(kEvalChunk, indices.size() - start));
    const auto batch = make_batch(ds, chunk);
    ad::Tape<T> tape;
    const auto bound = lpdgcn::bind(tape, net.store(), net.bn_stats(), Mode::eval);
    const auto pass = net.forward(batch, bound, unused);
    if (pass.alpha) observe_alpha(pass.alpha->value(), check);
    correct += count_correct(pass.logits.value(), batch.labels);
  }
  return static_cast<double>(correct) / static_cast<double>(indices.size());
}

/// Consecutive slices of `order`; a final slice of one graph joins its predecessor.
std::vector<std::span<const std::size_t>> make_batches(std::span<const std::size_t> order, std::size_t batch_size) {
  std::vector<std::span<const std::size_t>> out;
  for (std::size_t start = 0; start < order.size(); start += batch_size)
    out.push_back(order.subspan(start, std::min(batch_size, order.size() - start)));
  if (out.size() >= 2 && out.back().size() < 2) {
    const auto merged = out[out.size() - 2].size() + out.back().size();
    out.pop_back();
    out.back() = order.subspan(order.size() - merged);
  }
  return out;
}

template <typename T>
TrainResult train_impl(const Dataset& ds, std::span<const std::size_t> train, std::span<const std::size_t> test,
                       const RunConfig& config, const TrainOptions& options) {
  const Hyper& hyper = config.hyper;
  hyper.validate();
  const ModelConfig model = config.effective_model();
  model.validate();
  if (train.size() < 2) throw std::invalid_argument("train_fold: need at least two training graphs");
  for (auto i : train)
    if (i >= ds.size()) throw std::out_of_range("train_fold: graph index out of range");
  std::vector<char> in_train(ds.size(), 0);
  for (auto i : test)
    if (i >= ds.size()) throw std::out_of_range("train_fold: graph index out of range");
  for (auto i : train) in_train[i] = 1;
  for (auto i : test)
    if (in_train[i]) throw std::invalid_argument("train_fold: graph " + std::to_string(i) + " is in both splits");

  const std::uint64_t seed = hyper.seed;
  Network<T> net(model, derive_seed({seed, options.fold, kInitStream}));
  AdamState<T> adam(net.store(), hyper.adam_beta1, hyper.adam_beta2, hyper.adam_eps);

  TrainResult result;
  TrainReport& report = result.report;
  report.seed = seed;
  report.fold = options.fold;
  report.config = config.entries();
  report.best_test_acc = -1.0;

  const auto started = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(train.begin(), train.end());
  const double n_train = static_cast<double>(train.size());

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double lr = lr_at_epoch(hyper, epoch);
    std::copy(train.begin(), train.end(), order.begin());
    Rng(derive_seed({seed, options.fold, epoch, kShuffleStream})).shuffle(order);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    const auto batches = make_batches(order, hyper.batch_size);
    for (std::size_t b = 0; b < batches.size(); ++b) {
      const auto batch = make_batch(ds, batches[b]);
      ad::Tape<T> tape;
      const auto bound = lpdgcn::bind(tape, net.store(), net.bn_stats(), Mode::train);
      Rng dropout_rng(derive_seed({seed, options.fold, epoch, b, kDropoutStream}));
      const auto pass = net.forward(batch, bound, dropout_rng);
      if (pass.alpha) observe_alpha(pass.alpha->value(), report.attention);
      rec.loss_total += static_cast<double>(pass.loss.value().item());
      rec.loss_gc += static_cast<double>(pass.loss_gc.value().item());
      if (pass.loss_lfr) rec.loss_lfr += static_cast<double>(pass.loss_lfr->value().item());

      const auto grads = ad::backward(pass.loss);
      std::vector<Matrix<T>> g;
      g.reserve(bound.vars.size());
      for (const auto& v : bound.vars) g.push_back(grads.of(v));
      adam_step(net.store(), g, adam, lr);
    }
    rec.loss_total /= n_train;
    rec.loss_gc /= n_train;
    rec.loss_lfr /= n_train;
    rec.train_acc = evaluate(net, ds, train, report.attention);
    rec.test_acc = evaluate(net, ds, test, report.attention);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!test.empty() && rec.test_acc > report.best_test_acc) {
      report.best_test_acc = rec.test_acc;
      report.best_epoch = epoch;
    }
    report.epochs.push_back(rec);
  }

  if (test.empty()) {
    report.final_test_acc = std::numeric_limits<double>::quiet_NaN();
    report.best_test_acc = std::numeric_limits<double>::quiet_NaN();
  } else {
    report.final_test_acc = report.epochs.empty() ? evaluate(net, ds, test, report.attention)
                                                  : report.epochs.back().test_acc;
    if (report.epochs.empty()) report.best_test_acc = report.final_test_acc;
  }
  if (options.keep_params) report.final_params = checkpoint_to_json(net.store(), net.bn_stats());
  result.test_accuracy = report.final_test_acc;
  return result;
}

/// Runs fn(0..n-1) on up to `jobs` threads; the first exception is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

/// Config entries that can change a result; where output goes and how many
/// threads ran are left out so summaries of equal runs compare equal.
std::vector<std::pair<std::string, std::string>> result_entries(const RunConfig& config) {
  auto entries = config.entries();
  std::erase_if(entries, [](const auto& e) { return e.first == "output_dir" || e.first == "jobs"; });
  return entries;
}

CVReport summarise(const Dataset& ds, const RunConfig& config, std::vector<TrainReport> folds) {
  CVReport out;
  out.variant = config.variant_name();
  out.dataset = ds.name;
  out.fold_seed = config.fold_seed;
  out.seed = config.hyper.seed;
  out.config = result_entries(config);
  for (const auto& r : folds) {
    out.fold_accuracies.push_back(r.final_test_acc);
    out.best_epoch_accuracies.push_back(r.best_test_acc);
  }
  out.mean = mean(out.fold_accuracies);
  out.std = sample_std(out.fold_accuracies);
  out.fold_reports = std::move(folds);
  return out;
}

}  // namespace

TrainResult train_fold(const Dataset& ds, std::span<const std::size_t> train, std::span<const std::size_t> test,
                       const RunConfig& config, const TrainOptions& options) {
  if (config.precision == Precision::f64) return train_impl<double>(ds, train, test, config, options);
  return train_impl<float>(ds, train, test, config, options);
}

CVReport cross_validate(const Dataset& ds, const RunConfig& config) {
  const auto plan = stratified_folds(ds, config.folds, config.fold_seed);
  std::vector<TrainReport> reports(plan.k);
  parallel_for(plan.k, config.jobs, [&](std::size_t f) {
    std::vector<std::size_t> train;
    for (std::size_t g = 0; g < plan.k; ++g)
      if (g != f) train.insert(train.end(), plan.folds[g].begin(), plan.folds[g].end());
    std::sort(train.begin(), train.end());
    TrainOptions options;
    options.fold = f;
    reports[f] = train_fold(ds, train, plan.folds[f], config, options).report;
  });
  return summarise(ds, config, std::move(reports));
}

std::vector<CVReport> ablate(const Dataset& ds, const RunConfig& config) {
  std::vector<CVReport> out;
  for (const char* variant : {"full", "nolfr", "nodc", "nogca"}) {
    RunConfig c = config;
    c.model.arch = Architecture::lpdgcn;
    c.set("variant", variant);
    out.push_back(cross_validate(ds, c));
  }
  return out;
}

std::vector<double> default_grid(SweepParameter p) {
  if (p == SweepParameter::lambda) return {0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 2.0, 5.0, 10.0};
  return {0.0, 0.1, 0.3, 0.5, 0.7, 0.9};
}

std::vector<CVReport> sweep(const Dataset& ds, const RunConfig& config, SweepParameter p,
                            std::span<const double> grid) {
  std::vector<CVReport> out;
  for (double v : grid) {
    RunConfig c = config;
    if (p == SweepParameter::lambda) c.hyper.lambda = v;
    else c.hyper.dropout_p = v;
    auto report = cross_validate(ds, c);
    std::ostringstream name;
    name << (p == SweepParameter::lambda ? "lambda=" : "dropout=") << v;
    report.variant = name.str();
    out.push_back(std::move(report));
  }
  return out;
}

Dataset load_dataset(const RunConfig& config) {
  return one_hot_features(parse_tu_dataset(config.dataset_root, config.dataset));
}

RunConfig bind_dataset(RunConfig config, const Dataset& ds) {
  config.model.input_width = ds.feature_width;
  config.model.num_classes = ds.num_classes;
  return config;
}

Dataset gradcheck_fixture() {
  Dataset ds;
  ds.name = "fixture";
  Graph triangle;
  triangle.node_count = 3;
  triangle.edges = {{0, 1}, {0, 2}, {1, 2}};
  triangle.node_labels = {0, 1, 2};
  triangle.graph_label = 0;
  Graph pair;
  pair.node_count = 2;
  pair.edges = {{0, 1}};
  pair.node_labels = {1, 0};
  pair.graph_label = 1;
  ds.graphs = {triangle, pair};
  ds.num_classes = 2;
  ds.num_node_labels = 3;
  ds.class_values = {0, 1};
  ds.node_label_values = {0, 1, 2};
  return one_hot_features(std::move(ds));
}

namespace {

/// Loss of the model family selected by `config` for one fixed batch, with a
/// fresh copy of the batch-norm statistics and the same dropout stream on
/// every call.
template <typename T>
std::function<ad::Var<T>(ad::Tape<T>&, std::span<const ad::Var<T>>)> fixed_loss(const ModelConfig& config,
                                                                                 const GraphBatch& batch,
                                                                                 std::uint64_t seed) {
  if (config.arch == Architecture::gin) {
    auto params = std::make_shared<GinParams<T>>(init_gin_params<T>(config, seed));
    return [params, config, &batch, seed](ad::Tape<T>& tape, std::span<const ad::Var<T>> vars) {
      auto stats = params->bn_stats;
      const Bound<T> bound{&tape, {vars.begin(), vars.end()}, &stats, Mode::train};
      Rng rng(derive_seed({seed, kDropoutStream}));
      return gin_forward<T>(batch, *params, bound, config, rng).loss_gc;
    };
  }
  auto params = std::make_shared<ModelParams<T>>(init_params<T>(config, seed));
  return [params, config, &batch, seed](ad::Tape<T>& tape, std::span<const ad::Var<T>> vars) {
    auto stats = params->bn_stats;
    const Bound<T> bound{&tape, {vars.begin(), vars.end()}, &stats, Mode::train};
    Rng rng(derive_seed({seed, kDropoutStream}));
    return model_forward<T>(batch, *params, bound, config, rng).loss;
  };
}

}  // namespace

GradCheckReport model_gradient_check(const ModelConfig& config, const Dataset& graphs, std::uint64_t seed,
                                     double step) {
  std::vector<std::size_t> all(graphs.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto batch = make_batch(graphs, all);
  const auto values = config.arch == Architecture::gin ? init_gin_params<double>(config, seed).store.values
                                                       : init_params<double>(config, seed).store.values;
  return finite_difference_check(fixed_loss<double>(config, batch, seed), fixed_loss<long double>(config, batch, seed),
                                 values, step);
}

}  // namespace lpdgcn
