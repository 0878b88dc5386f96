#include "lpdgcn/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "lpdgcn/checkpoint.hpp"
#include "lpdgcn/harness.hpp"
#include "lpdgcn/stats.hpp"

namespace lpdgcn {

namespace {

struct Options {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> jobs;
  std::string output_dir;

  double step = 1e-5;
  std::size_t gradcheck_width = 8;
  double gradcheck_tolerance = 1e-4;

  std::optional<std::size_t> fold;

  std::string sweep_param = "lambda";
  std::vector<double> grid;

  std::string compare_a, compare_b;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

RunConfig effective_config(const Options& o) {
  RunConfig config;
  if (!o.config_path.empty()) config = parse_config_file(o.config_path, config);
  for (const auto& assignment : o.overrides) {
    const auto [key, value] = split_assignment(assignment);
    config.set(key, value);
  }
  if (o.jobs) config.jobs = *o.jobs;
  if (!o.output_dir.empty()) config.output_dir = o.output_dir;
  return config;
}

int cmd_inspect(const RunConfig& config, std::ostream& out) {
  const auto ds = parse_tu_dataset(config.dataset_root, config.dataset);
  const auto s = dataset_stats(ds);
  out << "dataset       " << ds.name << "\n"
      << "graphs        " << s.graphs << "\n"
      << "classes       " << s.classes << "\n"
      << "avg nodes     " << fixed(s.avg_nodes, 2) << "\n"
      << "avg edges     " << fixed(s.avg_edges, 2) << "\n"
      << "node labels   " << s.node_labels << "\n";
  return 0;
}

int cmd_gradcheck(const RunConfig& config, const Options& o, std::ostream& out) {
  const auto fixture = gradcheck_fixture();
  ModelConfig model = bind_dataset(config, fixture).effective_model();
  model.hidden = model.readout_dim = model.decoder_hidden = o.gradcheck_width;
  const auto report = model_gradient_check(model, fixture, config.hyper.seed, o.step);
  out << "coordinates checked   " << report.coordinates << "\n"
      << "max relative error    " << report.max_rel_error << "\n"
      << "worst coordinate      param " << report.worst_param << " index " << report.worst_index
      << " (analytic " << report.worst_analytic << ", numeric " << report.worst_numeric << ")\n";
  if (report.max_rel_error > o.gradcheck_tolerance) {
    out << "FAILED: exceeds tolerance " << o.gradcheck_tolerance << "\n";
    return 1;
  }
  out << "ok (tolerance " << o.gradcheck_tolerance << ")\n";
  return 0;
}

int cmd_train(const RunConfig& base, const Options& o, std::ostream& out) {
  const auto ds = load_dataset(base);
  const RunConfig config = bind_dataset(base, ds);
  std::vector<std::size_t> train, test;
  TrainOptions options;
  options.keep_params = true;
  if (o.fold) {
    const auto plan = stratified_folds(ds, config.folds, config.fold_seed);
    if (*o.fold >= plan.k) throw std::invalid_argument("--fold must be below " + std::to_string(plan.k));
    for (std::size_t g = 0; g < plan.k; ++g) {
      auto& dst = g == *o.fold ? test : train;
      dst.insert(dst.end(), plan.folds[g].begin(), plan.folds[g].end());
    }
    std::sort(train.begin(), train.end());
    options.fold = *o.fold;
  } else {
    train.resize(ds.size());
    std::iota(train.begin(), train.end(), std::size_t{0});
  }
  const auto result = train_fold(ds, train, test, config, options);
  const auto& r = result.report;
  const std::string stem = config.variant_name() + "_train";
  write_text(config.output_dir / (stem + ".csv"), curve_csv(r));
  write_text(config.output_dir / (stem + "_params.json"), r.final_params->dump() + "\n");
  if (!r.epochs.empty()) {
    const auto& first = r.epochs.front();
    const auto& last = r.epochs.back();
    out << "epochs               " << r.epochs.size() << "\n"
        << "loss (first, last)   " << first.loss_total << ", " << last.loss_total << "\n"
        << "L_LFR (first, last)  " << first.loss_lfr << ", " << last.loss_lfr << "\n"
        << "train accuracy       " << fixed(last.train_acc, 4) << "\n";
  }
  if (!test.empty())
    out << "test accuracy        " << fixed(result.test_accuracy, 4) << " (best " << fixed(r.best_test_acc, 4)
        << " at epoch " << r.best_epoch << ")\n";
  out << "wrote " << (config.output_dir / (stem + ".csv")).string() << "\n";
  return 0;
}

void print_reports(const std::vector<CVReport>& reports, const RunConfig& config, std::ostream& out) {
  const auto written = emit_reports(reports, config.output_dir);
  for (const auto& r : reports) {
    out << r.variant << " folds:";
    for (double a : r.fold_accuracies) out << " " << fixed(a, 4);
    out << "\n";
  }
  out << "\n" << results_table(reports) << "\nwrote " << written.size() << " files under "
      << config.output_dir.string() << "\n";
}

int cmd_cv(const RunConfig& base, std::ostream& out) {
  const auto ds = load_dataset(base);
  const RunConfig config = bind_dataset(base, ds);
  print_reports({cross_validate(ds, config)}, config, out);
  return 0;
}

int cmd_ablate(const RunConfig& base, std::ostream& out) {
  const auto ds = load_dataset(base);
  const RunConfig config = bind_dataset(base, ds);
  print_reports(ablate(ds, config), config, out);
  return 0;
}

int cmd_sweep(const RunConfig& base, const Options& o, std::ostream& out) {
  const auto param = o.sweep_param == "dropout" ? SweepParameter::dropout : SweepParameter::lambda;
  const auto grid = o.grid.empty() ? default_grid(param) : o.grid;
  const auto ds = load_dataset(base);
  const RunConfig config = bind_dataset(base, ds);
  print_reports(sweep(ds, config, param, grid), config, out);
  return 0;
}

CVReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return cv_report_from_json(nlohmann::json::parse(in));
}

int cmd_compare(const Options& o, std::ostream& out) {
  const auto a = read_report(o.compare_a);
  const auto b = read_report(o.compare_b);
  const auto result = rank_sum_test(a.fold_accuracies, b.fold_accuracies);
  out << a.variant << " mean " << fixed(a.mean, 4) << " vs " << b.variant << " mean " << fixed(b.mean, 4) << "\n"
      << "rank sum " << result.statistic << ", p = " << result.p_value
      << (result.exact ? " (exact)" : " (normal approximation)") << "\n";
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"LPD-GCN graph classification experiments", "lpdgcn"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("-c,--config", o.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("-s,--set", o.overrides, "override one key (key=value), repeatable");
  app.add_option("-j,--jobs", o.jobs, "folds trained concurrently")->check(CLI::PositiveNumber);
  app.add_option("-o,--output", o.output_dir, "directory for curves, summaries and tables");

  auto* inspect = app.add_subcommand("inspect", "print dataset statistics");
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of the model gradients");
  gradcheck->add_option("--step", o.step, "central-difference step")->check(CLI::PositiveNumber);
  gradcheck->add_option("--width", o.gradcheck_width, "hidden width of the checked model")->check(CLI::PositiveNumber);
  gradcheck->add_option("--tolerance", o.gradcheck_tolerance, "largest accepted relative error");
  auto* train = app.add_subcommand("train", "one training run with per-epoch curves");
  train->add_option("--fold", o.fold, "hold out this fold (default: train on every graph)");
  auto* cv = app.add_subcommand("cv", "stratified k-fold cross-validation");
  auto* abl = app.add_subcommand("ablate", "full model and the three ablated variants");
  auto* sw = app.add_subcommand("sweep", "cross-validation over a lambda or dropout grid");
  sw->add_option("--param", o.sweep_param, "lambda or dropout")->check(CLI::IsMember({"lambda", "dropout"}));
  sw->add_option("--grid", o.grid, "comma-separated values (default: built-in grid)")->delimiter(',');
  auto* cmp = app.add_subcommand("compare", "rank-sum test between two cv summaries");
  cmp->add_option("a", o.compare_a, "first summary JSON")->required();
  cmp->add_option("b", o.compare_b, "second summary JSON")->required();

  RunConfig config;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    config = effective_config(o);
    config.hyper.validate();
    config.effective_model().validate();
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  out << "# effective configuration\n" << format_entries(config) << "\n";
  out.flush();
  try {
    if (inspect->parsed()) return cmd_inspect(config, out);
    if (gradcheck->parsed()) return cmd_gradcheck(config, o, out);
    if (train->parsed()) return cmd_train(config, o, out);
    if (cv->parsed()) return cmd_cv(config, out);
    if (abl->parsed()) return cmd_ablate(config, out);
    if (sw->parsed()) return cmd_sweep(config, o, out);
    if (cmp->parsed()) return cmd_compare(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace lpdgcn
