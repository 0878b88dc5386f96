#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lpdgcn/harness.hpp"

namespace lpdgcn {

namespace {

std::string number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

nlohmann::json nullable(double v) { return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v); }

double from_nullable(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string display_name(const std::string& variant) {
  if (variant == "full") return "LPD-GCN";
  if (variant == "nolfr") return "LPD-GCN(NoLFR)";
  if (variant == "nodc") return "LPD-GCN(NoDC)";
  if (variant == "nogca") return "LPD-GCN(NoGCA)";
  if (variant == "gin") return "GIN";
  return variant;
}

}  // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string curve_csv(const TrainReport& report) {
  std::string out = kCurveHeader;
  out += "\n";
  for (const auto& e : report.epochs) {
    out += std::to_string(e.epoch) + "," + number(e.loss_total) + "," + number(e.loss_gc) + "," +
           number(e.loss_lfr) + "," + number(e.train_acc) + "," + number(e.lr) + "," + number(e.seconds) + "\n";
  }
  return out;
}

nlohmann::json cv_report_to_json(const CVReport& report) {
  nlohmann::json config = nlohmann::json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  nlohmann::json folds = nlohmann::json::array();
  nlohmann::json best = nlohmann::json::array();
  for (double a : report.fold_accuracies) folds.push_back(nullable(a));
  for (double a : report.best_epoch_accuracies) best.push_back(nullable(a));
  return {
      {"variant", report.variant},
      {"dataset", report.dataset},
      {"seed", report.seed},
      {"fold_seed", report.fold_seed},
      {"fold_accuracies", folds},
      {"best_epoch_accuracies", best},
      {"mean", nullable(report.mean)},
      {"std", nullable(report.std)},
      {"config", config},
  };
}

CVReport cv_report_from_json(const nlohmann::json& j) {
  CVReport r;
  r.variant = j.at("variant").get<std::string>();
  r.dataset = j.at("dataset").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.fold_seed = j.at("fold_seed").get<std::uint64_t>();
  for (const auto& a : j.at("fold_accuracies")) r.fold_accuracies.push_back(from_nullable(a));
  for (const auto& a : j.at("best_epoch_accuracies")) r.best_epoch_accuracies.push_back(from_nullable(a));
  r.mean = from_nullable(j.at("mean"));
  r.std = from_nullable(j.at("std"));
  for (const auto& [k, v] : j.at("config").items()) r.config.emplace_back(k, v.get<std::string>());
  return r;
}

std::string results_table(std::span<const CVReport> reports) {
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, display_name(r.variant).size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-*s  %s\n", static_cast<int>(width), "Method",
                reports.empty() ? "Accuracy (%)" : (reports.front().dataset + " (%)").c_str());
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-*s  %.1f \xC2\xB1 %.1f\n", static_cast<int>(width),
                  display_name(r.variant).c_str(), 100.0 * r.mean, 100.0 * r.std);
    out += line;
  }
  return out;
}

std::vector<std::filesystem::path> emit_reports(std::span<const CVReport> reports, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& r : reports) {
    for (std::size_t f = 0; f < r.fold_reports.size(); ++f) {
      auto path = dir / (r.variant + "_fold" + std::to_string(f) + ".csv");
      write_text(path, curve_csv(r.fold_reports[f]));
      written.push_back(std::move(path));
    }
    auto path = dir / (r.variant + "_summary.json");
    write_text(path, cv_report_to_json(r).dump(2) + "\n");
    written.push_back(std::move(path));
  }
  auto table = dir / "results.txt";
  write_text(table, results_table(reports));
  written.push_back(std::move(table));
  return written;
}

}  // namespace lpdgcn
