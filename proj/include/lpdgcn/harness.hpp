#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lpdgcn/config.hpp"
#include "lpdgcn/gradcheck.hpp"
#include "lpdgcn/graph_io.hpp"

namespace lpdgcn {

struct EpochRecord {
  std::size_t epoch = 0;
  /// Epoch sums of the minibatch losses divided by the number of training graphs.
  double loss_total = 0.0;
  double loss_gc = 0.0;
  double loss_lfr = 0.0;
  /// Eval-mode accuracy on the whole training set after the epoch.
  double train_acc = 0.0;
  /// Eval-mode accuracy on the held-out graphs; NaN without a test set.
  double test_acc = 0.0;
  double lr = 0.0;
  /// Wall-clock seconds since the start of training.
  double seconds = 0.0;
};

/// Attention-weight health over every forward pass of a run.
struct AttentionCheck {
  std::size_t forward_passes = 0;
  double max_sum_deviation = 0.0;  // max over graphs of |sum_k alpha_k - 1|
  double min_alpha = 1.0;

  void merge(const AttentionCheck& o);
};

struct TrainReport {
  std::vector<EpochRecord> epochs;
  std::uint64_t seed = 0;
  std::size_t fold = 0;
  std::vector<std::pair<std::string, std::string>> config;
  double final_test_acc = 0.0;
  double best_test_acc = 0.0;
  std::size_t best_epoch = 0;
  AttentionCheck attention;
  /// Final parameters in checkpoint format, when requested.
  std::optional<nlohmann::json> final_params;
};

struct TrainOptions {
  std::size_t fold = 0;
  bool keep_params = false;
};

struct TrainResult {
  TrainReport report;
  double test_accuracy = 0.0;
};

/// Trains from scratch on `train` and reports final-epoch accuracy on `test`
/// (which may be empty). Minibatches follow a per-epoch shuffle seeded by
/// (seed, fold, epoch); a tail batch of one graph joins the previous batch.
TrainResult train_fold(const Dataset& ds, std::span<const std::size_t> train, std::span<const std::size_t> test,
                       const RunConfig& config, const TrainOptions& options = {});

struct CVReport {
  std::string variant;
  std::string dataset;
  std::vector<double> fold_accuracies;
  std::vector<double> best_epoch_accuracies;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  std::uint64_t fold_seed = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;
  /// Per-fold training logs; not part of the JSON summary.
  std::vector<TrainReport> fold_reports;
};

/// Stratified k-fold CV; fold f is the test set of the f-th run. Folds run on
/// up to `config.jobs` threads; results do not depend on the thread count.
CVReport cross_validate(const Dataset& ds, const RunConfig& config);

/// Full model and the NoLFR / NoDC / NoGCA variants on a shared fold plan.
std::vector<CVReport> ablate(const Dataset& ds, const RunConfig& config);

enum class SweepParameter { lambda, dropout };

std::vector<double> default_grid(SweepParameter p);

/// One cross-validation per grid value, everything else fixed.
std::vector<CVReport> sweep(const Dataset& ds, const RunConfig& config, SweepParameter p, std::span<const double> grid);

/// Dataset from the config's root and name, one-hot encoded.
Dataset load_dataset(const RunConfig& config);

/// Fills the dataset-dependent model widths.
RunConfig bind_dataset(RunConfig config, const Dataset& ds);

/// Two small labelled graphs (a triangle and a single edge, three node
/// labels), one-hot encoded. Used for gradient checks.
Dataset gradcheck_fixture();

/// Central-difference check of every learnable array of the model built from
/// `config` at double precision. Train-mode loss on one batch of `graphs`;
/// dropout uses the same mask on every evaluation.
GradCheckReport model_gradient_check(const ModelConfig& config, const Dataset& graphs, std::uint64_t seed,
                                     double step);

// Reports -------------------------------------------------------------------

inline constexpr const char* kCurveHeader = "epoch,loss_total,loss_gc,loss_lfr,train_acc,lr,seconds";

std::string curve_csv(const TrainReport& report);
nlohmann::json cv_report_to_json(const CVReport& report);
CVReport cv_report_from_json(const nlohmann::json& j);

/// Rows like "LPD-GCN(NoLFR)   95.2 ± 3.9" for each report.
std::string results_table(std::span<const CVReport> reports);

/// Writes <variant>_fold<f>.csv per fold, <variant>_summary.json per report
/// and results.txt into `dir`.
std::vector<std::filesystem::path> emit_reports(std::span<const CVReport> reports, const std::filesystem::path& dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace lpdgcn
