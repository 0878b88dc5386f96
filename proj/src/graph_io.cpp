#include "lpdgcn/graph_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lpdgcn/rng.hpp"

namespace lpdgcn {

namespace {

namespace fs = std::filesystem;

struct IntLine {
  std::size_t line_no = 0;
  std::vector<std::int64_t> values;
};

std::vector<IntLine> read_int_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open required file " + path.string());
  std::vector<IntLine> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    IntLine parsed{line_no, {}};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
      if (p == end) break;
      std::int64_t v = 0;
      auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc() ||
          (next < end && *next != ' ' && *next != '\t' && *next != ',' && *next != '\r'))
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": not an integer: '" +
                         line + "'");
      parsed.values.push_back(v);
      p = next;
    }
    if (!parsed.values.empty()) out.push_back(std::move(parsed));
  }
  return out;
}

std::int64_t single_value(const IntLine& l, const fs::path& path) {
  if (l.values.size() != 1)
    throw ParseError(path.string() + ":" + std::to_string(l.line_no) + ": expected one integer");
  return l.values[0];
}

/// Maps raw labels to 0..n-1 by first appearance.
class Remap {
 public:
  std::size_t operator()(std::int64_t raw) {
    auto [it, inserted] = index_.try_emplace(raw, values_.size());
    if (inserted) values_.push_back(raw);
    return it->second;
  }
  const std::vector<std::int64_t>& values() const { return values_; }

 private:
  std::map<std::int64_t, std::size_t> index_;
  std::vector<std::int64_t> values_;
};

}  // namespace

Dataset parse_tu_dataset(const fs::path& root, const std::string& name) {
  const auto file = [&](const char* suffix) { return root / (name + suffix); };
  const auto a_path = file("_A.txt");
  const auto ind_path = file("_graph_indicator.txt");
  const auto gl_path = file("_graph_labels.txt");
  const auto nl_path = file("_node_labels.txt");
  for (const auto& p : {a_path, ind_path, gl_path, nl_path})
    if (!fs::exists(p)) throw ParseError("missing file " + p.string());

  const auto indicator = read_int_lines(ind_path);
  const auto graph_labels = read_int_lines(gl_path);
  const auto node_labels = read_int_lines(nl_path);
  const auto adjacency = read_int_lines(a_path);

  const std::size_t num_graphs = graph_labels.size();
  const std::size_t num_nodes = indicator.size();
  if (node_labels.size() != num_nodes)
    throw ParseError(nl_path.string() + ": " + std::to_string(node_labels.size()) + " labels for " +
                     std::to_string(num_nodes) + " nodes in " + ind_path.filename().string());

  Dataset ds;
  ds.name = name;
  ds.graphs.resize(num_graphs);

  Remap class_map;
  for (std::size_t g = 0; g < num_graphs; ++g)
    ds.graphs[g].graph_label = class_map(single_value(graph_labels[g], gl_path));

  // Global node id (0-based) -> (graph, local index).
  std::vector<std::size_t> node_graph(num_nodes), node_local(num_nodes);
  Remap label_map;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    const std::int64_t gid = single_value(indicator[v], ind_path);
    if (gid < 1 || static_cast<std::size_t>(gid) > num_graphs)
      throw ParseError(ind_path.string() + ":" + std::to_string(indicator[v].line_no) + ": graph id " +
                       std::to_string(gid) + " outside [1," + std::to_string(num_graphs) + "]");
    auto& g = ds.graphs[static_cast<std::size_t>(gid - 1)];
    node_graph[v] = static_cast<std::size_t>(gid - 1);
    node_local[v] = g.node_count++;
    g.node_labels.push_back(label_map(single_value(node_labels[v], nl_path)));
  }
  for (std::size_t g = 0; g < num_graphs; ++g)
    if (ds.graphs[g].node_count == 0)
      throw ParseError(ind_path.string() + ": graph " + std::to_string(g + 1) + " has no nodes");

  std::vector<std::set<std::pair<std::size_t, std::size_t>>> edge_sets(num_graphs);
  for (const auto& line : adjacency) {
    if (line.values.size() != 2)
      throw ParseError(a_path.string() + ":" + std::to_string(line.line_no) + ": expected 'i, j'");
    const auto i = line.values[0], j = line.values[1];
    for (auto id : {i, j})
      if (id < 1 || static_cast<std::size_t>(id) > num_nodes)
        throw ParseError(a_path.string() + ":" + std::to_string(line.line_no) + ": node id " +
                         std::to_string(id) + " outside [1," + std::to_string(num_nodes) + "]");
    const auto u = static_cast<std::size_t>(i - 1), v = static_cast<std::size_t>(j - 1);
    if (node_graph[u] != node_graph[v])
      throw ParseError(a_path.string() + ":" + std::to_string(line.line_no) + ": edge " + std::to_string(i) +
                       "-" + std::to_string(j) + " joins graphs " + std::to_string(node_graph[u] + 1) + " and " +
                       std::to_string(node_graph[v] + 1));
    const auto a = node_local[u], b = node_local[v];
    edge_sets[node_graph[u]].insert({std::min(a, b), std::max(a, b)});
  }
  for (std::size_t g = 0; g < num_graphs; ++g)
    ds.graphs[g].edges.assign(edge_sets[g].begin(), edge_sets[g].end());

  ds.class_values = class_map.values();
  ds.node_label_values = label_map.values();
  ds.num_classes = ds.class_values.size();
  ds.num_node_labels = ds.node_label_values.size();
  return ds;
}

void write_tu_dataset(const Dataset& ds, const fs::path& root) {
  fs::create_directories(root);
  const auto open = [&](const char* suffix) {
    const auto path = root / (ds.name + suffix);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
  };
  auto a = open("_A.txt");
  auto ind = open("_graph_indicator.txt");
  auto gl = open("_graph_labels.txt");
  auto nl = open("_node_labels.txt");
  std::size_t base = 1;
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const auto& graph = ds.graphs[g];
    gl << graph.graph_label << '\n';
    for (std::size_t v = 0; v < graph.node_count; ++v) {
      ind << g + 1 << '\n';
      nl << graph.node_labels[v] << '\n';
    }
    for (const auto& [u, v] : graph.edges) {
      a << base + u << ", " << base + v << '\n';
      if (u != v) a << base + v << ", " << base + u << '\n';
    }
    base += graph.node_count;
  }
}

Dataset one_hot_features(Dataset ds) {
  const std::size_t t = ds.num_node_labels;
  for (auto& g : ds.graphs) {
    g.features = Matrix<double>(g.node_count, t);
    for (std::size_t v = 0; v < g.node_count; ++v) g.features(v, g.node_labels[v]) = 1.0;
  }
  ds.feature_width = t;
  return ds;
}

GraphBatch make_batch(std::span<const Graph* const> graphs) {
  if (graphs.empty()) throw std::invalid_argument("make_batch: empty graph list");
  const std::size_t width = graphs.front()->features.cols();
  std::size_t total = 0, total_edges = 0;
  for (const Graph* g : graphs) {
    if (g->features.cols() != width || g->features.rows() != g->node_count)
      throw std::invalid_argument("make_batch: feature matrix " + g->features.shape_string() +
                                  " inconsistent with width " + std::to_string(width));
    total += g->node_count;
    total_edges += g->edges.size();
  }

  GraphBatch b;
  b.num_graphs = graphs.size();
  b.num_nodes = total;
  b.x = Matrix<double>(total, width);
  b.node_graph_id.reserve(total);
  b.node_labels.reserve(total);
  b.directed_edges.reserve(2 * total_edges);
  b.labels.reserve(graphs.size());
  b.offsets.reserve(graphs.size() + 1);

  std::size_t offset = 0;
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Graph& g = *graphs[gi];
    b.offsets.push_back(offset);
    std::copy(g.features.data(), g.features.data() + g.features.size(), b.x.data() + offset * width);
    for (std::size_t v = 0; v < g.node_count; ++v) {
      b.node_graph_id.push_back(gi);
      b.node_labels.push_back(g.node_labels[v]);
    }
    for (const auto& [u, v] : g.edges) {
      b.directed_edges.push_back({offset + u, offset + v});
      if (u != v) b.directed_edges.push_back({offset + v, offset + u});
    }
    b.labels.push_back(g.graph_label);
    offset += g.node_count;
  }
  b.offsets.push_back(offset);
  return b;
}

GraphBatch make_batch(const Dataset& ds, std::span<const std::size_t> indices) {
  std::vector<const Graph*> ptrs;
  ptrs.reserve(indices.size());
  for (auto i : indices) ptrs.push_back(&ds.graphs.at(i));
  return make_batch(ptrs);
}

FoldPlan stratified_folds(const Dataset& ds, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("stratified_folds: need k >= 2, got " + std::to_string(k));
  if (k > ds.size())
    throw std::invalid_argument("stratified_folds: k=" + std::to_string(k) + " exceeds " +
                                std::to_string(ds.size()) + " graphs");
  std::size_t num_classes = ds.num_classes;
  for (const auto& g : ds.graphs) num_classes = std::max(num_classes, g.graph_label + 1);

  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < ds.size(); ++i) by_class[ds.graphs[i].graph_label].push_back(i);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::size_t next = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    Rng rng(derive_seed({seed, c}));
    rng.shuffle(by_class[c]);
    for (auto idx : by_class[c]) {
      plan.folds[next].push_back(idx);
      next = (next + 1) % k;
    }
  }
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

DatasetStats dataset_stats(const Dataset& ds) {
  DatasetStats s;
  s.graphs = ds.size();
  s.classes = ds.num_classes;
  s.node_labels = ds.num_node_labels;
  std::size_t nodes = 0, edges = 0;
  for (const auto& g : ds.graphs) {
    nodes += g.node_count;
    edges += g.edges.size();
  }
  if (s.graphs > 0) {
    s.avg_nodes = static_cast<double>(nodes) / static_cast<double>(s.graphs);
    s.avg_edges = static_cast<double>(edges) / static_cast<double>(s.graphs);
  }
  return s;
}

}  // namespace lpdgcn
