#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpdgcn/ops.hpp"
#include "lpdgcn/tensor.hpp"

namespace lpdgcn {

/// Raised for malformed or inconsistent TU-format input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Graph {
  std::size_t node_count = 0;
  /// Unordered pairs stored once with first <= second, sorted.
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::size_t> node_labels;
  std::size_t graph_label = 0;
  /// [node_count x d_i]; empty until one_hot_features.
  Matrix<double> features;

  bool operator==(const Graph&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  std::size_t num_classes = 0;
  std::size_t num_node_labels = 0;
  std::size_t feature_width = 0;
  /// Raw file label for each class / node-label index (first-appearance order).
  std::vector<std::int64_t> class_values;
  std::vector<std::int64_t> node_label_values;

  std::size_t size() const { return graphs.size(); }
  bool operator==(const Dataset&) const = default;
};

/// Block-concatenation of several graphs.
struct GraphBatch {
  Matrix<double> x;                         // [N_B x d_i]
  std::vector<DirectedEdge> directed_edges;  // both directions of every edge
  std::vector<std::size_t> node_graph_id;    // per node, in [0, B)
  std::vector<std::size_t> labels;           // per graph
  std::size_t num_graphs = 0;
  std::size_t num_nodes = 0;
  /// Node-label targets for reconstruction, per node.
  std::vector<std::size_t> node_labels;
  /// Starting row of each graph's block, plus a final sentinel N_B.
  std::vector<std::size_t> offsets;
};

struct FoldPlan {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;
};

/// Reads name_A.txt, name_graph_indicator.txt, name_graph_labels.txt and
/// name_node_labels.txt from `root`. Node ids in the files are 1-based.
Dataset parse_tu_dataset(const std::filesystem::path& root, const std::string& name);

/// Writes `ds` in the same format (edges in both directions, remapped labels).
void write_tu_dataset(const Dataset& ds, const std::filesystem::path& root);

/// Gives every graph a [node_count x T] one-hot matrix of its node labels.
Dataset one_hot_features(Dataset ds);

GraphBatch make_batch(std::span<const Graph* const> graphs);
GraphBatch make_batch(const Dataset& ds, std::span<const std::size_t> indices);

/// Per class: shuffle members with `seed`, then deal them round-robin into
/// folds. The dealing position carries over between classes, so both fold
/// sizes and per-class counts differ by at most one.
FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed);

struct DatasetStats {
  std::size_t graphs = 0;
  std::size_t classes = 0;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  std::size_t node_labels = 0;
};

DatasetStats dataset_stats(const Dataset& ds);

}  // namespace lpdgcn
